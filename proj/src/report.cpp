#include "tailbench/simulation.hpp"

#include "tailbench/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tailbench {

namespace {

std::string printf_string(const char* fmt, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string exact(double v)
{
  return printf_string("%.17g", v);
}

std::string study_name(Study s)
{
  return s == Study::Tail ? "tail" : "mean_excess";
}

std::string rule_name(const TargetSpec& t)
{
  switch (t.rule) {
    case TargetRule::HallPower:
      return "hall";
    case TargetRule::WeibullLog:
      return t.log_base == WeibullLogBase::LnN ? "weibull" : "weibull_lnlog2";
    case TargetRule::Quantile:
      return "quantile";
    case TargetRule::Fixed:
      return "fixed";
  }
  return "?";
}

const char* kCsvHeader = "table,row,block,dist,study,n,replications,base_seed,rule,constant,C3,x,u,truth,"
                         "kappa_above_one,estimator,rel_mse,sd,rel_mse_x100,sd_x100,trimmed_rel_mse,mc_se,"
                         "n_finite,n_nonfinite,n_flagged,unstable\n";

std::string csv_rows(const SimResult& r, const std::string& table, const std::string& row, const std::string& block)
{
  std::string out;
  const auto& c = r.config;
  const std::string prefix = table + ",\"" + row + "\",\"" + block + "\",\"" + describe(c.dist) + "\"," +
                             study_name(c.study) + "," + std::to_string(c.n) + "," + std::to_string(c.replications) +
                             "," + std::to_string(c.base_seed) + "," + rule_name(c.target) + "," +
                             exact(c.target.constant) + "," + exact(c.C3) + "," + exact(r.target.x) + "," +
                             exact(r.target.u) + "," + exact(r.target.truth) + "," + (r.kappa_above_one ? "1" : "0");
  for (const auto& s : r.summaries) {
    out += prefix + "," + std::string(to_string(s.estimator)) + "," + exact(s.rel_mse) + "," + exact(s.sd) + "," +
           exact(s.rel_mse_x100) + "," + exact(s.sd_x100) + "," + exact(s.trimmed_rel_mse) + "," + exact(s.mc_se()) +
           "," + std::to_string(s.n_finite) + "," + std::to_string(s.n_nonfinite) + "," +
           std::to_string(s.n_flagged) + "," + (s.unstable() ? "1" : "0") + "\n";
  }
  return out;
}

} // namespace

std::string format_rate(double value)
{
  double r = std::round(value * 1000.0) / 1000.0;
  if (r == 0.0)
    r = 0.0;
  std::string s = printf_string("%.3f", r);
  if (std::abs(value - r) < 1e-12) {
    while (s.back() == '0')
      s.pop_back();
    if (s.back() == '.')
      s.pop_back();
  }
  return s;
}

std::string format_rate(const RateExponent& rate)
{
  if (!rate.applicable())
    return kNoRate;
  return format_rate(*rate.value);
}

std::string format_cell(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "∞" : "-∞";
  const double a = std::abs(value);
  if (a < 10.0)
    return printf_string("%.3f", value);
  if (a < 1e4) {
    const int decimals = 3 - static_cast<int>(std::floor(std::log10(a)));
    char fmt[16];
    std::snprintf(fmt, sizeof fmt, "%%.%df", decimals < 0 ? 0 : decimals);
    return printf_string(fmt, value);
  }
  int k = static_cast<int>(std::floor(std::log10(a)));
  long m = std::lround(a / std::pow(10.0, k));
  if (m >= 10) {
    m = 1;
    ++k;
  }
  const std::string sign = value < 0 ? "-" : "";
  if (m == 1)
    return sign + "10^" + std::to_string(k);
  return sign + std::to_string(m) + "×10^" + std::to_string(k);
}

std::string render_markdown(const TableRun& run)
{
  const bool burr = run.id == TableId::T3 || run.id == TableId::T6;
  const bool mef = run.id == TableId::T6 || run.id == TableId::T7;
  std::ostringstream os;
  os << "# Table " << table_number(run.id) << ": relative MSE and sd of the "
     << (mef ? "mean excess" : "tail probability") << " estimators\n\n";
  const auto& first = run.results.front().config;
  os << "base seed " << run.options.base_seed << ", " << first.replications << " replications per cell, C3 = "
     << (burr ? kBurrC3 : kWeibullC3) << ". Values are unscaled means and standard deviations of the squared "
     << "relative error; multiply by 100 for percent units. "
     << "∞ marks cells where more than " << kNonfiniteFraction * 100 << "% of replications are nonfinite.\n";

  const std::size_t blocks = run.block_labels.size();
  const std::size_t per_n = blocks / 2;
  for (std::size_t half = 0; half < 2; ++half) {
    os << "\n| " << (burr ? "c,l" : "kappa,C") << " |";
    for (std::size_t b = half * per_n; b < (half + 1) * per_n; ++b)
      for (auto e : run.estimators)
        os << " " << to_string(e) << " (" << run.block_labels[b] << ") | sd |";
    os << "\n|---|";
    for (std::size_t b = 0; b < per_n * run.estimators.size(); ++b)
      os << "---|---|";
    os << "\n";
    for (std::size_t row = 0; row < run.row_labels.size(); ++row) {
      os << "| " << run.row_labels[row] << " |";
      for (std::size_t b = half * per_n; b < (half + 1) * per_n; ++b) {
        const SimResult& r = run.cell(row, b);
        for (const auto& s : r.summaries) {
          if (s.mostly_infinite())
            os << " ∞ | " << kNoRate << " |";
          else
            os << " " << format_cell(s.rel_mse) << " | " << format_cell(s.sd) << " |";
        }
      }
      os << "\n";
    }
  }
  bool any_kappa = false;
  for (const auto& r : run.results)
    any_kappa |= r.kappa_above_one;
  if (any_kappa)
    os << "\nRows with kappa > 1 lie outside the range kappa <= 1 for which the GPD approximation of "
          "Weibull excesses is stated.\n";
  return os.str();
}

std::string render_csv(const TableRun& run)
{
  std::string out = kCsvHeader;
  for (std::size_t row = 0; row < run.row_labels.size(); ++row)
    for (std::size_t b = 0; b < run.block_labels.size(); ++b)
      out += csv_rows(run.cell(row, b), table_number(run.id), run.row_labels[row], run.block_labels[b]);
  return out;
}

std::string render_csv(const std::vector<SimResult>& results)
{
  std::string out = kCsvHeader;
  for (const auto& r : results)
    out += csv_rows(r, "", describe(r.config.dist), "");
  return out;
}

std::string render_plot_data(const TableRun& run)
{
  std::ostringstream os;
  os << "# block row estimator n constant rel_mse sd\n";
  for (std::size_t b = 0; b < run.block_labels.size(); ++b) {
    for (std::size_t row = 0; row < run.row_labels.size(); ++row) {
      const SimResult& r = run.cell(row, b);
      for (const auto& s : r.summaries)
        os << b << " " << row << " " << to_string(s.estimator) << " " << r.config.n << " "
           << exact(r.config.target.constant) << " " << exact(s.rel_mse) << " " << exact(s.sd) << "\n";
    }
    os << "\n\n";
  }
  return os.str();
}

WrittenFiles write_table(const TableRun& run, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  const std::string stem = "table" + table_number(run.id) + "_seed" + std::to_string(run.options.base_seed);
  WrittenFiles files{ dir / (stem + ".csv"), dir / (stem + ".md"), dir / (stem + ".dat") };
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
      throw IoError("cannot write " + p.string());
    f << text;
  };
  write(files.csv, render_csv(run));
  write(files.markdown, render_markdown(run));
  write(files.plot_data, render_plot_data(run));
  return files;
}

} // namespace tailbench
