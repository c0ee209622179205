#include "tailbench/cli.hpp"

#include "tailbench/config.hpp"
#include "tailbench/errors.hpp"
#include "tailbench/estimators.hpp"
#include "tailbench/simulation.hpp"
#include "tailbench/tail_index.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tailbench {

namespace {

using ordered_json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

std::pair<double, double> parse_pair(const std::string& text, const std::string& what)
{
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw UsageError(what + " expects two comma-separated numbers, got '" + text + "'");
  return { parse_number(text.substr(0, comma)), parse_number(text.substr(comma + 1)) };
}

std::string rate_text(const RateExponent& r)
{
  return r.applicable() ? format_rate(r) : "n/a";
}

std::string rate_line(const RateSet& s)
{
  return "NE: " + rate_text(s.ne) + "  PT: " + rate_text(s.pt) + "  PI: " + rate_text(s.pi);
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
  std::ofstream f(p, std::ios::binary);
  if (!f)
    throw IoError("cannot write " + p.string());
  f << text;
}

ordered_json record_json(const EstimateRecord& rec, double target)
{
  ordered_json j;
  j["estimator"] = to_string(rec.estimator);
  j["quantity"] = rec.quantity == Quantity::TailProbability ? "tail_probability" : "mean_excess";
  j["target"] = target;
  j["value"] = std::isfinite(rec.value) ? ordered_json(rec.value) : ordered_json(nullptr);
  j["raw"] = std::isfinite(rec.raw) ? ordered_json(rec.raw) : ordered_json(nullptr);
  j["flags"] = describe_flags(rec.flags);
  ordered_json d = ordered_json::object();
  for (const auto& [k, v] : rec.diagnostics)
    d[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
  j["diagnostics"] = d;
  return j;
}

struct EstimateOptions
{
  std::string file;
  std::string method;
  std::optional<double> x;
  std::optional<double> u;
  std::optional<std::size_t> r;
  bool json = false;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err)
{
  std::string method = o.method;
  std::transform(method.begin(), method.end(), method.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const bool mef = method.size() > 4 && method.substr(method.size() - 4) == "-mef";
  const std::string base = mef ? method.substr(0, method.size() - 4) : method;
  std::optional<EstimatorTag> tag;
  if (base == "al")
    tag = EstimatorTag::AL;
  else if (base == "pb")
    tag = EstimatorTag::PB;
  else if (base == "pt" || (mef && base == "pe"))
    tag = EstimatorTag::PT;
  else if (base == "pi")
    tag = EstimatorTag::PI;
  if (!tag)
    throw UsageError("unknown method '" + o.method + "'");

  const std::vector<double> data = read_data_file(o.file);
  if (data.size() < 10)
    throw UsageError(o.file + ": need at least 10 numbers, found " + std::to_string(data.size()));

  double target = 0.0;
  if (mef) {
    if (!o.u || !(*o.u > 0.0) || !std::isfinite(*o.u))
      throw UsageError("mean-excess methods need a positive --u");
    target = *o.u;
  } else {
    if (!o.x || !(*o.x > 0.0) || !std::isfinite(*o.x))
      throw UsageError("tail methods need a positive --x");
    target = *o.x;
  }

  std::optional<TailIndexEstimate> hill;
  if (*tag == EstimatorTag::PI || *tag == EstimatorTag::PB)
    hill = hill_fit(data, o.r.value_or(default_r(data.size())));

  EstimateRecord rec{};
  if (mef) {
    switch (*tag) {
      case EstimatorTag::PI:
        rec = mef_pi(*hill, target);
        break;
      case EstimatorTag::PT:
        rec = mef_pe(data, target);
        break;
      default:
        rec = mef_ne(data, target, *tag, hill);
        break;
    }
  } else {
    switch (*tag) {
      case EstimatorTag::PI:
        rec = tail_pi(*hill, target);
        break;
      case EstimatorTag::PT: {
        if (!o.u)
          throw UsageError("pt needs the threshold --u");
        if (!(*o.u > 0.0) || !(*o.u < target))
          throw UsageError("the threshold --u must lie in (0, x)");
        rec = tail_pt(data, target, *o.u);
        break;
      }
      default:
        rec = tail_ne(data, target, *tag, hill);
        break;
    }
  }

  if (o.json) {
    out << record_json(rec, target).dump() << "\n";
  } else {
    out << to_string(rec.estimator) << (mef ? " mean excess at u = " : " tail probability at x = ") << target << ": "
        << rec.value << "\n";
    for (const auto& [k, v] : rec.diagnostics)
      out << "  " << k << " = " << v << "\n";
  }
  if (rec.flags != 0)
    err << "warning: estimate flagged: " << describe_flags(rec.flags) << "\n";
  return kExitOk;
}

struct RatesOptions
{
  std::string burr;
  std::string weibull;
  double c2 = 0.2;
  bool mef = false;
  double p = 0.25;
};

int cmd_rates(const RatesOptions& o, std::ostream& out)
{
  if (!o.burr.empty() && !o.weibull.empty())
    throw UsageError("give either --burr or --weibull, not both");
  if (!o.burr.empty()) {
    const auto [c, ell] = parse_pair(o.burr, "--burr");
    const auto params = hall_params_of_burr(BurrDist(c, ell));
    out << rate_line(o.mef ? mef_rate_exponents(params, o.p) : tail_rate_exponents(params)) << "\n";
    return kExitOk;
  }
  if (!o.weibull.empty()) {
    if (o.mef)
      throw UsageError("mean-excess rates are tabulated for the Hall class only");
    const auto [kappa, C] = parse_pair(o.weibull, "--weibull");
    out << rate_line(tail_rate_exponents(WeibullTailParams(C, kappa), o.c2)) << "\n";
    return kExitOk;
  }
  out << run_rate_tables();
  return kExitOk;
}

struct ReproduceOptions
{
  std::string table;
  std::uint64_t seed = 1;
  std::optional<std::size_t> reps;
  std::string out_dir = ".";
  std::string x_rule = "ln-n";
  std::string u_rule = "c3x";
  unsigned threads = 0;
};

int cmd_reproduce(const ReproduceOptions& o, std::ostream& out)
{
  const auto id = parse_table_id(o.table);
  if (!id)
    throw UsageError("unknown table '" + o.table + "' (expected t3, t4, t6 or t7)");
  TableOptions opts;
  opts.base_seed = o.seed;
  opts.replications = o.reps;
  opts.threads = o.threads;
  if (o.x_rule == "ln-n")
    opts.weibull_log = WeibullLogBase::LnN;
  else if (o.x_rule == "ln-log2-n")
    opts.weibull_log = WeibullLogBase::LnLog2N;
  else
    throw UsageError("--x-rule must be ln-n or ln-log2-n");
  if (o.u_rule == "quantile")
    opts.quantile_thresholds = true;
  else if (o.u_rule != "c3x")
    throw UsageError("--u-rule must be c3x or quantile");
  if (o.reps && *o.reps < 1)
    throw UsageError("--reps must be at least 1");

  const TableRun run = run_table(*id, opts);
  const WrittenFiles files = write_table(run, o.out_dir);

  RunManifest m;
  m.command = "reproduce " + o.table + " --x-rule " + o.x_rule + " --u-rule " + o.u_rule;
  m.seed = o.seed;
  m.output_dir = o.out_dir;
  m.replications = run.results.front().config.replications;
  const std::size_t full = (*id == TableId::T3 || *id == TableId::T4) ? kTailReplications : kMeanExcessReplications;
  if (m.replications < full)
    m.note = "reduced replication count (" + std::to_string(m.replications) + " of " + std::to_string(full) +
             "): Monte-Carlo error grows by about sqrt(" + std::to_string(full) + "/" +
             std::to_string(m.replications) + "), widen comparison tolerances accordingly";
  m.files = { files.csv.filename().string(), files.markdown.filename().string(), files.plot_data.filename().string() };
  const auto manifest_path = std::filesystem::path(o.out_dir) /
                             ("table" + table_number(*id) + "_seed" + std::to_string(o.seed) + ".manifest.json");
  write_text(manifest_path, m.to_json());

  for (const auto& p : { files.csv, files.markdown, files.plot_data, manifest_path })
    out << "wrote " << p.string() << "\n";
  return kExitOk;
}

struct RunOptions
{
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
};

int cmd_run(const RunOptions& o, std::ostream& out)
{
  const SimConfig cfg = load_config(o.config);
  const SimResult res = run_cell(cfg, o.threads);
  out << describe(cfg.dist) << " n=" << cfg.n << " x=" << res.target.x << " u=" << res.target.u
      << " truth=" << res.target.truth << " replications=" << cfg.replications << "\n";
  for (const auto& s : res.summaries)
    out << "  " << to_string(s.estimator) << ": rel_mse " << format_cell(s.rel_mse) << "  sd " << format_cell(s.sd)
        << "  (x100: " << format_cell(s.rel_mse_x100) << ", " << format_cell(s.sd_x100) << ")  nonfinite "
        << s.n_nonfinite << "  flagged " << s.n_flagged << "\n";
  if (res.kappa_above_one)
    out << "  note: kappa > 1 lies outside the stated range of the GPD approximation\n";
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    const auto stem = std::filesystem::path(o.config).stem().string() + "_seed" + std::to_string(cfg.base_seed);
    const auto csv = std::filesystem::path(o.out_dir) / (stem + ".csv");
    write_text(csv, render_csv(std::vector<SimResult>{ res }));
    RunManifest m;
    m.command = "run";
    m.config_path = o.config;
    m.seed = cfg.base_seed;
    m.output_dir = o.out_dir;
    m.replications = cfg.replications;
    m.files = { csv.filename().string() };
    const auto manifest = std::filesystem::path(o.out_dir) / (stem + ".manifest.json");
    write_text(manifest, m.to_json());
    out << "wrote " << csv.string() << "\nwrote " << manifest.string() << "\n";
  }
  return kExitOk;
}

} // namespace

std::string RunManifest::to_json() const
{
  ordered_json j;
  j["command"] = command;
  j["config_path"] = config_path;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["version"] = version;
  j["replications"] = replications;
  if (!note.empty())
    j["note"] = note;
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::vector<double> read_data_file(const std::filesystem::path& path)
{
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open data file " + path.string());
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v))
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": not a finite number: '" + token +
                                  "'");
    values.push_back(v);
  }
  return values;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Tail probability and mean excess estimation benchmarks", "tailbench" };
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a tail probability or mean excess from a data file");
  estimate->add_option("file", est.file, "Data file, one number per line")->required();
  estimate->add_option("--method", est.method, "al|pb|pt|pi for tails, al-mef|pb-mef|pe-mef|pi-mef for mean excess")
    ->required();
  estimate->add_option("--x", est.x, "Evaluation point of the tail probability");
  estimate->add_option("--u", est.u, "Threshold (PT tail) or mean-excess level");
  estimate->add_option("--r", est.r, "Order statistics used by the Hill-type fit");
  estimate->add_flag("--json", est.json, "Print one JSON line");

  RatesOptions rates;
  auto* rates_cmd = app.add_subcommand("rates", "Print convergence-rate exponents");
  rates_cmd->add_option("--burr", rates.burr, "Burr parameters c,l");
  rates_cmd->add_option("--weibull", rates.weibull, "Weibull parameters kappa,C");
  rates_cmd->add_option("--c2", rates.c2, "Weibull target constant C2")->capture_default_str();
  rates_cmd->add_flag("--mef", rates.mef, "Mean-excess rates at u = n^p");
  rates_cmd->add_option("--p", rates.p, "Threshold exponent p")->capture_default_str();

  ReproduceOptions rep;
  auto* repro = app.add_subcommand("reproduce", "Run a simulation table grid");
  repro->add_option("table", rep.table, "t3, t4, t6 or t7")->required();
  repro->add_option("--seed", rep.seed, "Base seed")->capture_default_str();
  repro->add_option("--reps", rep.reps, "Override the replication count");
  repro->add_option("--out", rep.out_dir, "Output directory")->capture_default_str();
  repro->add_option("--x-rule", rep.x_rule, "Weibull target: ln-n or ln-log2-n")->capture_default_str();
  repro->add_option("--u-rule", rep.u_rule, "Mean-excess threshold: c3x or quantile")->capture_default_str();
  repro->add_option("--threads", rep.threads, "Worker threads (0 = automatic)");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation cell from a config file");
  run_cmd->add_option("--config", run.config, "Config file")->required();
  run_cmd->add_option("--out", run.out_dir, "Write CSV and manifest here");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = automatic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(kVersion) + "\n" : app.help());
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (estimate->parsed())
      return cmd_estimate(est, out, err);
    if (rates_cmd->parsed())
      return cmd_rates(rates, out);
    if (repro->parsed())
      return cmd_reproduce(rep, out);
    if (run_cmd->parsed())
      return cmd_run(run, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

} // namespace tailbench
