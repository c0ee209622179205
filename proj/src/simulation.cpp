#include "tailbench/simulation.hpp"

#include "tailbench/errors.hpp"
#include "tailbench/kernel.hpp"
#include "tailbench/tail_index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

namespace tailbench {

namespace {

bool is_burr(const Distribution& d)
{
  return std::holds_alternative<BurrDist>(d);
}

bool is_weibull(const Distribution& d)
{
  return std::holds_alternative<WeibullDist>(d);
}

bool has_hall_tail(const Distribution& d)
{
  if (is_burr(d))
    return true;
  if (const auto* g = std::get_if<GpdDist>(&d))
    return g->gamma > 0.0;
  return false;
}

bool has_finite_mean(const Distribution& d)
{
  if (const auto* b = std::get_if<BurrDist>(&d))
    return b->c * b->ell > 1.0;
  if (const auto* g = std::get_if<GpdDist>(&d))
    return g->gamma < 1.0;
  return true;
}

bool contains(const std::vector<EstimatorTag>& tags, EstimatorTag t)
{
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

// Per-replication outcome of one estimator in one cell.
struct Outcome
{
  double sq_rel_err = 0.0;
  bool finite = false;
  bool flagged = false;
};

struct Group
{
  std::vector<std::size_t> members;
  bool need_hill = false;
  bool need_al = false;
  std::size_t slots = 0;
};

double estimate_raw(const SimConfig& cfg, EstimatorTag tag, const TailTarget& t, std::span<const double> sample,
                    const std::optional<TailIndexEstimate>& hill, const std::optional<Bandwidth>& h_al,
                    bool& flagged)
{
  const bool tail = cfg.study == Study::Tail;
  EstimateRecord rec{};
  switch (tag) {
    case EstimatorTag::PI:
      if (!hill)
        return std::numeric_limits<double>::quiet_NaN();
      rec = tail ? tail_pi(*hill, t.x) : mef_pi(*hill, t.u);
      break;
    case EstimatorTag::PT:
      rec = tail ? tail_pt(sample, t.x, t.u) : mef_pe(sample, t.u);
      break;
    case EstimatorTag::AL:
      if (!h_al)
        return std::numeric_limits<double>::quiet_NaN();
      rec = tail ? tail_ne_with(sample, t.x, EstimatorTag::AL, *h_al) : mef_ne_with(sample, t.u, EstimatorTag::AL, *h_al);
      break;
    case EstimatorTag::PB:
      if (!hill)
        return std::numeric_limits<double>::quiet_NaN();
      rec = tail ? tail_ne(sample, t.x, EstimatorTag::PB, hill) : mef_ne(sample, t.u, EstimatorTag::PB, hill);
      break;
  }
  flagged = rec.flags != 0;
  return rec.raw;
}

EstimatorSummary summarize(EstimatorTag tag, std::vector<double> finite_values, std::size_t n_nonfinite,
                           std::size_t n_flagged)
{
  EstimatorSummary s;
  s.estimator = tag;
  s.n_finite = finite_values.size();
  s.n_nonfinite = n_nonfinite;
  s.n_flagged = n_flagged;
  if (finite_values.empty()) {
    s.rel_mse = s.sd = s.trimmed_rel_mse = std::numeric_limits<double>::infinity();
  } else {
    const double m = static_cast<double>(finite_values.size());
    double sum = 0.0;
    for (double v : finite_values)
      sum += v;
    s.rel_mse = sum / m;
    double ss = 0.0;
    for (double v : finite_values)
      ss += (v - s.rel_mse) * (v - s.rel_mse);
    s.sd = finite_values.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;

    std::sort(finite_values.begin(), finite_values.end());
    const std::size_t cut = finite_values.size() / 20;
    double tsum = 0.0;
    for (std::size_t i = cut; i < finite_values.size() - cut; ++i)
      tsum += finite_values[i];
    s.trimmed_rel_mse = tsum / static_cast<double>(finite_values.size() - 2 * cut);
  }
  s.rel_mse_x100 = 100.0 * s.rel_mse;
  s.sd_x100 = 100.0 * s.sd;
  return s;
}

template<class Work>
void parallel_for(std::size_t count, unsigned threads, Work&& work)
{
  if (threads == 0)
    threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      work(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

std::string fraction_label(double v)
{
  if (std::abs(v - std::round(v)) < 1e-12)
    return std::to_string(static_cast<long long>(std::llround(v)));
  for (int den = 2; den <= 64; ++den) {
    const double num = v * den;
    if (std::abs(num - std::round(num)) < 1e-9)
      return std::to_string(std::llround(num)) + "/" + std::to_string(den);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

} // namespace

EstimatorSummary summarize_errors(EstimatorTag tag, std::span<const double> squared_errors, std::size_t n_flagged)
{
  std::vector<double> finite;
  finite.reserve(squared_errors.size());
  for (double v : squared_errors)
    if (std::isfinite(v))
      finite.push_back(v);
  return summarize(tag, std::move(finite), squared_errors.size() - finite.size(), n_flagged);
}

double EstimatorSummary::mc_se() const
{
  return n_finite > 0 ? sd / std::sqrt(static_cast<double>(n_finite)) : std::numeric_limits<double>::infinity();
}

bool EstimatorSummary::mostly_infinite() const
{
  const double total = static_cast<double>(n_finite + n_nonfinite);
  return static_cast<double>(n_nonfinite) > kNonfiniteFraction * total;
}

bool EstimatorSummary::unstable() const
{
  return mostly_infinite() || !(rel_mse < kUnstableRelMse);
}

const EstimatorSummary& SimResult::at(EstimatorTag tag) const
{
  for (const auto& s : summaries)
    if (s.estimator == tag)
      return s;
  throw DomainError("estimator " + std::string(to_string(tag)) + " was not run in this cell");
}

void validate(const SimConfig& c)
{
  if (c.replications < 1)
    throw ConfigError("replications must be at least 1");
  if (c.n < 10)
    throw ConfigError("n must be at least 10");
  if (c.estimators.empty())
    throw ConfigError("no estimators requested");
  for (std::size_t i = 0; i < c.estimators.size(); ++i)
    for (std::size_t j = i + 1; j < c.estimators.size(); ++j)
      if (c.estimators[i] == c.estimators[j])
        throw ConfigError("estimator " + std::string(to_string(c.estimators[i])) + " listed twice");
  if (c.r && (*c.r < 1 || *c.r >= c.n))
    throw ConfigError("r must lie in [1, n-1]");

  const TargetSpec& t = c.target;
  switch (t.rule) {
    case TargetRule::HallPower:
      if (!is_burr(c.dist))
        throw ConfigError("the C1 n^delta target needs a Burr distribution");
      if (!(t.constant > 0.0))
        throw ConfigError("C1 must be positive");
      break;
    case TargetRule::WeibullLog:
      if (!is_weibull(c.dist))
        throw ConfigError("the C2 (ln n)^(1/kappa) target needs a Weibull distribution");
      if (!(t.constant > 0.0))
        throw ConfigError("C2 must be positive");
      if (t.log_base == WeibullLogBase::LnLog2N && !(std::log2(static_cast<double>(c.n)) > 1.0))
        throw ConfigError("ln(log2 n) must be positive");
      break;
    case TargetRule::Quantile:
      if (!(t.constant > 0.0 && t.constant < 1.0))
        throw ConfigError("quantile level must lie in (0, 1)");
      break;
    case TargetRule::Fixed:
      if (!(t.constant > 0.0))
        throw ConfigError("fixed target must be positive");
      break;
  }
  const bool uses_c3 = c.study == Study::Tail || t.rule == TargetRule::HallPower || t.rule == TargetRule::WeibullLog;
  if (uses_c3 && !(c.C3 > 0.0 && c.C3 <= 1.0))
    throw ConfigError("C3 must lie in (0, 1]");

  if (c.study == Study::Tail && contains(c.estimators, EstimatorTag::PI) && !has_hall_tail(c.dist))
    throw ConfigError("the PI tail estimator applies to Pareto-type (Hall class) tails only");
  if (c.study == Study::MeanExcess && !has_finite_mean(c.dist))
    throw ConfigError("the mean excess function of " + describe(c.dist) + " is infinite");
  try {
    resolve_target(c);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("target cannot be resolved: ") + e.what());
  }
}

TailTarget resolve_target(const SimConfig& c)
{
  const TargetSpec& t = c.target;
  const double n = static_cast<double>(c.n);
  double x = 0.0;
  switch (t.rule) {
    case TargetRule::HallPower: {
      const auto params = hall_params_of_burr(std::get<BurrDist>(c.dist));
      x = t.constant * std::pow(n, delta(params));
      break;
    }
    case TargetRule::WeibullLog: {
      const auto& w = std::get<WeibullDist>(c.dist);
      const double base = t.log_base == WeibullLogBase::LnN ? std::log(n) : std::log(std::log2(n));
      x = t.constant * std::pow(base, 1.0 / w.kappa);
      break;
    }
    case TargetRule::Quantile:
      x = quantile(c.dist, t.constant);
      break;
    case TargetRule::Fixed:
      x = t.constant;
      break;
  }
  const bool scaled = t.rule == TargetRule::HallPower || t.rule == TargetRule::WeibullLog;
  if (c.study == Study::Tail)
    return { x, c.C3 * x, tail_prob(c.dist, x) };
  const double u = scaled ? c.C3 * x : x;
  return { x, u, true_mef(c.dist, u) };
}

unsigned default_thread_count()
{
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TAILBENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1)
      return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

std::vector<SimResult> run_cells(const std::vector<SimConfig>& configs, unsigned threads)
{
  std::vector<TailTarget> targets;
  targets.reserve(configs.size());
  for (const auto& c : configs) {
    validate(c);
    targets.push_back(resolve_target(c));
  }

  // Cells that share a sample stream share the per-replication preprocessing.
  std::map<std::tuple<std::string, std::size_t, std::size_t, std::uint64_t, std::size_t>, Group> groups;
  std::vector<std::tuple<std::string, std::size_t, std::size_t, std::uint64_t, std::size_t>> order;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    auto key = std::make_tuple(describe(c.dist), c.n, c.replications, c.base_seed, c.r.value_or(0));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted)
      order.push_back(key);
    Group& g = it->second;
    g.members.push_back(i);
    g.slots += c.estimators.size();
    g.need_hill |= contains(c.estimators, EstimatorTag::PI) || contains(c.estimators, EstimatorTag::PB);
    g.need_al |= contains(c.estimators, EstimatorTag::AL);
  }

  std::vector<SimResult> results(configs.size());
  for (const auto& key : order) {
    const Group& g = groups.at(key);
    const SimConfig& head = configs[g.members.front()];
    const std::size_t reps = head.replications;
    std::vector<Outcome> outcomes(reps * g.slots);

    parallel_for(reps, threads, [&](std::size_t rep) {
      const auto x = sample(head.dist, head.n, head.base_seed + rep);
      std::optional<TailIndexEstimate> hill;
      if (g.need_hill) {
        std::vector<double> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        try {
          hill = hill_fit_sorted(sorted, head.r.value_or(default_r(head.n)));
        } catch (const std::exception&) {
        }
      }
      std::optional<Bandwidth> h_al;
      if (g.need_al) {
        try {
          h_al = al_bandwidth(x);
        } catch (const std::exception&) {
        }
      }
      Outcome* out = &outcomes[rep * g.slots];
      for (std::size_t m : g.members) {
        const SimConfig& c = configs[m];
        const TailTarget& t = targets[m];
        for (EstimatorTag tag : c.estimators) {
          Outcome o;
          try {
            bool flagged = false;
            const double raw = estimate_raw(c, tag, t, x, hill, h_al, flagged);
            const double rel = (raw - t.truth) / t.truth;
            o.sq_rel_err = rel * rel;
            o.finite = std::isfinite(o.sq_rel_err);
            o.flagged = flagged;
          } catch (const std::runtime_error&) {
            o.finite = false;
            o.flagged = true;
          }
          *out++ = o;
        }
      }
    });

    std::size_t offset = 0;
    for (std::size_t m : g.members) {
      const SimConfig& c = configs[m];
      SimResult& res = results[m];
      res.config = c;
      res.target = targets[m];
      if (const auto* w = std::get_if<WeibullDist>(&c.dist))
        res.kappa_above_one = w->kappa > 1.0;
      for (std::size_t e = 0; e < c.estimators.size(); ++e) {
        std::vector<double> finite;
        finite.reserve(reps);
        std::size_t nonfinite = 0;
        std::size_t flagged = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const Outcome& o = outcomes[rep * g.slots + offset + e];
          if (o.finite)
            finite.push_back(o.sq_rel_err);
          else
            ++nonfinite;
          if (o.flagged)
            ++flagged;
        }
        res.summaries.push_back(summarize(c.estimators[e], std::move(finite), nonfinite, flagged));
      }
      offset += c.estimators.size();
    }
  }
  return results;
}

SimResult run_cell(const SimConfig& config, unsigned threads)
{
  return run_cells({ config }, threads).front();
}

std::string table_number(TableId id)
{
  switch (id) {
    case TableId::T3:
      return "3";
    case TableId::T4:
      return "4";
    case TableId::T6:
      return "6";
    case TableId::T7:
      return "7";
  }
  return "?";
}

std::optional<TableId> parse_table_id(std::string_view text)
{
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "t3" || s == "3")
    return TableId::T3;
  if (s == "t4" || s == "4")
    return TableId::T4;
  if (s == "t6" || s == "6")
    return TableId::T6;
  if (s == "t7" || s == "7")
    return TableId::T7;
  return std::nullopt;
}

const SimResult& TableRun::cell(std::size_t row, std::size_t block) const
{
  return results.at(row * block_labels.size() + block);
}

std::vector<SimConfig> table_configs(TableId id, const TableOptions& o, std::vector<std::string>* row_labels,
                                     std::vector<std::string>* block_labels)
{
  const bool burr = id == TableId::T3 || id == TableId::T6;
  const bool mef = id == TableId::T6 || id == TableId::T7;

  std::vector<Distribution> rows;
  std::vector<std::string> labels;
  if (id == TableId::T3) {
    for (double ell : { 0.5, 1.0, 3.0 })
      for (double c : { 0.5, 1.0, 3.0 })
        rows.emplace_back(BurrDist(c, ell));
  } else if (id == TableId::T6) {
    for (auto [c, ell] : { std::pair{ 3.0, 0.5 }, { 3.0, 1.0 }, { 0.5, 3.0 }, { 1.0, 3.0 }, { 3.0, 3.0 } })
      rows.emplace_back(BurrDist(c, ell));
  } else {
    for (double kappa : { 0.5, 1.0, 3.0, 10.0 })
      rows.emplace_back(WeibullDist(1.0, kappa));
  }
  for (const auto& d : rows) {
    if (const auto* b = std::get_if<BurrDist>(&d))
      labels.push_back(fraction_label(b->c) + "," + fraction_label(b->ell));
    else {
      const auto& w = std::get<WeibullDist>(d);
      labels.push_back(fraction_label(w.kappa) + "," + fraction_label(w.C));
    }
  }

  std::vector<EstimatorTag> estimators{ EstimatorTag::PI, EstimatorTag::PT, EstimatorTag::AL, EstimatorTag::PB };
  if (id == TableId::T4)
    estimators = { EstimatorTag::PT, EstimatorTag::AL, EstimatorTag::PB };

  struct Block
  {
    std::size_t n;
    TargetSpec target;
    std::string label;
  };
  std::vector<Block> blocks;
  const std::vector<double> constants = burr ? std::vector<double>{ 0.5, 1.0, 2.0 } : std::vector<double>{ 0.2, 1.0 / 3.0, 0.5 };
  for (std::size_t log2n : { 8u, 12u }) {
    const std::size_t n = std::size_t{ 1 } << log2n;
    const std::string nlabel = "n=2^" + std::to_string(log2n);
    if (mef && o.quantile_thresholds) {
      for (double p : { 0.9, 0.95, 0.99, 0.995 }) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%g", p);
        blocks.push_back({ n, { TargetRule::Quantile, p, o.weibull_log }, nlabel + ", q=" + buf });
      }
      continue;
    }
    for (double k : constants) {
      TargetSpec t{ burr ? TargetRule::HallPower : TargetRule::WeibullLog, k, o.weibull_log };
      blocks.push_back({ n, t, nlabel + (burr ? ", C1=" : ", C2=") + fraction_label(k) });
    }
  }

  std::vector<SimConfig> configs;
  for (const auto& d : rows) {
    for (const auto& b : blocks) {
      SimConfig c;
      c.study = mef ? Study::MeanExcess : Study::Tail;
      c.dist = d;
      c.n = b.n;
      c.replications = o.replications.value_or(mef ? kMeanExcessReplications : kTailReplications);
      c.base_seed = o.base_seed;
      c.target = b.target;
      c.C3 = burr ? kBurrC3 : kWeibullC3;
      c.estimators = estimators;
      configs.push_back(std::move(c));
    }
  }
  if (row_labels)
    *row_labels = labels;
  if (block_labels) {
    block_labels->clear();
    for (const auto& b : blocks)
      block_labels->push_back(b.label);
  }
  return configs;
}

TableRun run_table(TableId id, const TableOptions& options)
{
  TableRun run;
  run.id = id;
  run.options = options;
  const auto configs = table_configs(id, options, &run.row_labels, &run.block_labels);
  run.estimators = configs.front().estimators;
  run.results = run_cells(configs, options.threads);
  return run;
}

// ---- analytic rate tables ----

namespace {

const std::vector<std::pair<double, double>>& burr_rate_rows()
{
  static const std::vector<std::pair<double, double>> rows{ { 0.5, 0.5 }, { 1.0, 0.5 }, { 3.0, 0.5 },
                                                            { 0.5, 1.0 }, { 1.0, 1.0 }, { 3.0, 1.0 },
                                                            { 0.5, 3.0 }, { 1.0, 3.0 }, { 3.0, 3.0 } };
  return rows;
}

std::string md_row(const std::vector<std::string>& cells)
{
  std::string s = "|";
  for (const auto& c : cells)
    s += " " + c + " |";
  return s + "\n";
}

std::string md_rule(std::size_t columns)
{
  std::string s = "|";
  for (std::size_t i = 0; i < columns; ++i)
    s += "---|";
  return s + "\n";
}

} // namespace

std::vector<RateRow> rate_table2_rows()
{
  std::vector<RateRow> rows;
  for (auto [c, ell] : burr_rate_rows()) {
    const auto hp = hall_params_of_burr(BurrDist(c, ell));
    const auto r = tail_rate_exponents(hp);
    rows.push_back({ fraction_label(c) + "," + fraction_label(ell), { format_rate(r.ne), format_rate(r.pt), format_rate(r.pi) } });
  }
  for (double c2 : { 0.2, 1.0 / 3.0, 0.5 }) {
    for (double kappa : { 0.5, 1.0, 3.0, 10.0 }) {
      const auto r = tail_rate_exponents(WeibullTailParams(1.0, kappa), c2);
      rows.push_back({ fraction_label(kappa) + ",1," + fraction_label(c2), { format_rate(r.ne), format_rate(r.pt) } });
    }
  }
  return rows;
}

std::vector<RateRow> rate_table5_rows()
{
  std::vector<RateRow> rows;
  for (auto [c, ell] : burr_rate_rows()) {
    const auto hp = hall_params_of_burr(BurrDist(c, ell));
    RateRow row{ fraction_label(c) + "," + fraction_label(ell), {} };
    for (double p : { 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0 }) {
      const auto r = mef_rate_exponents(hp, p);
      row.cells.push_back(format_rate(r.ne));
      row.cells.push_back(format_rate(r.pt));
      row.cells.push_back(format_rate(r.pi));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_rate_table1()
{
  std::string s = "## Relative-MSE convergence rates of the tail probability estimators\n\n";
  s += "x ~ C1 n^delta (Hall class), x ~ C2 (ln n)^(1/kappa) (Weibull class), delta = 1/(2 beta + alpha).\n\n";
  s += md_row({ "", "NE", "PT", "PI" });
  s += md_rule(4);
  s += md_row({ "Hall class", "n^(delta alpha - 1)", "n^(delta alpha - 1)", "n^(2 delta alpha - 2) (ln n)^2" });
  s += md_row({ "Weibull class", "n^(-1 + C C2^kappa)", "n^(-1 + C C2^kappa)", kNoRate });
  s += "\nNE needs beta > 3/2 for its optimal bandwidth to vanish; otherwise it is marked " + std::string(kNoRate) + ".\n";
  return s;
}

std::string render_rate_table2()
{
  const auto rows = rate_table2_rows();
  std::string s = "## Polynomial rates of the tail probability estimators\n\n### Burr\n\n";
  s += md_row({ "c,l", "alpha", "beta", "NE", "PT", "PI" });
  s += md_rule(6);
  std::size_t i = 0;
  for (auto [c, ell] : burr_rate_rows()) {
    const auto& r = rows[i++];
    s += md_row({ r.label, fraction_label(c * ell), fraction_label(c), r.cells[0], r.cells[1], r.cells[2] });
  }
  s += "\n### Weibull\n\n";
  s += md_row({ "kappa", "C", "C2", "NE", "PT" });
  s += md_rule(5);
  for (; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto first = r.label.find(',');
    const auto second = r.label.find(',', first + 1);
    s += md_row({ r.label.substr(0, first), r.label.substr(first + 1, second - first - 1), r.label.substr(second + 1),
                  r.cells[0], r.cells[1] });
  }
  return s;
}

std::string render_rate_table5()
{
  const auto rows = rate_table5_rows();
  std::string s = "## Polynomial MSE rates of the mean excess estimators\n\n";
  std::vector<std::string> head{ "c,l", "alpha", "beta" };
  for (const char* p : { "1/16", "1/8", "1/4", "3/8" })
    for (const char* e : { "NE", "PT", "PI" })
      head.push_back(std::string(e) + " u=n^" + p);
  s += md_row(head);
  s += md_rule(head.size());
  std::size_t i = 0;
  for (auto [c, ell] : burr_rate_rows()) {
    std::vector<std::string> cells{ rows[i].label, fraction_label(c * ell), fraction_label(c) };
    cells.insert(cells.end(), rows[i].cells.begin(), rows[i].cells.end());
    s += md_row(cells);
    ++i;
  }
  return s;
}

std::string run_rate_tables()
{
  return render_rate_table1() + "\n" + render_rate_table2() + "\n" + render_rate_table5();
}

} // namespace tailbench
