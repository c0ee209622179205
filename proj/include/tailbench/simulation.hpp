#pragma once

#include "tailbench/asymptotics.hpp"
#include "tailbench/distributions.hpp"
#include "tailbench/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tailbench {

enum class Study
{
  Tail,
  MeanExcess
};

// How the evaluation point is placed.
//   HallPower:  x = C1 n^delta (Burr only)
//   WeibullLog: x = C2 (ln n)^{1/kappa} (Weibull only)
//   Quantile:   x = F^{-1}(p)
//   Fixed:      x = constant
// The tail study uses x and the threshold u = C3 x. The mean-excess study
// uses u = C3 x for the first two rules and u = x for the last two.
enum class TargetRule
{
  HallPower,
  WeibullLog,
  Quantile,
  Fixed
};

// Logarithm inside the WeibullLog rule: ln n, or ln(log2 n) as in the
// "ln 8" / "ln 12" column headers.
enum class WeibullLogBase
{
  LnN,
  LnLog2N
};

struct TargetSpec
{
  TargetRule rule = TargetRule::HallPower;
  double constant = 1.0;
  WeibullLogBase log_base = WeibullLogBase::LnN;
};

// A resolved target: evaluation point, threshold and the exact value being estimated.
struct TailTarget
{
  double x;
  double u;
  double truth;
};

struct SimConfig
{
  Study study = Study::Tail;
  Distribution dist = BurrDist(1.0, 1.0);
  std::size_t n = 256;
  std::size_t replications = 1000;
  std::uint64_t base_seed = 1;
  TargetSpec target;
  double C3 = 0.5;
  std::vector<EstimatorTag> estimators{ EstimatorTag::PI, EstimatorTag::PT, EstimatorTag::AL, EstimatorTag::PB };
  // Number of order statistics for the Hill-type fit; default_r(n) when empty.
  std::optional<std::size_t> r;
};

inline constexpr std::size_t kTailReplications = 1000;
inline constexpr std::size_t kMeanExcessReplications = 10000;
inline constexpr double kBurrC3 = 0.5;
inline constexpr double kWeibullC3 = 0.99;
// A cell prints as infinite when more than this fraction of replications are nonfinite.
inline constexpr double kNonfiniteFraction = 0.01;
// Cells at or above this relative MSE count as numerically unstable.
inline constexpr double kUnstableRelMse = 1e3;

// Throws ConfigError on inconsistent settings; never samples.
void validate(const SimConfig& config);

TailTarget resolve_target(const SimConfig& config);

struct EstimatorSummary
{
  EstimatorTag estimator;
  // Mean and sample standard deviation of the finite per-replication squared
  // relative errors.
  double rel_mse = 0.0;
  double sd = 0.0;
  double rel_mse_x100 = 0.0;
  double sd_x100 = 0.0;
  // Mean after dropping 5% of the finite values at each end.
  double trimmed_rel_mse = 0.0;
  std::size_t n_finite = 0;
  std::size_t n_nonfinite = 0;
  std::size_t n_flagged = 0;

  // Monte-Carlo standard error of rel_mse.
  double mc_se() const;
  bool mostly_infinite() const;
  bool unstable() const;
};

// Aggregates per-replication squared relative errors. Nonfinite values are
// counted and left out of every statistic.
EstimatorSummary summarize_errors(EstimatorTag tag, std::span<const double> squared_errors, std::size_t n_flagged = 0);

struct SimResult
{
  SimConfig config;
  TailTarget target;
  // Weibull cells with kappa > 1 lie outside the light-tail GPD mapping's stated range.
  bool kappa_above_one = false;
  std::vector<EstimatorSummary> summaries;

  const EstimatorSummary& at(EstimatorTag tag) const;
};

// Worker threads: TAILBENCH_THREADS if set, else the hardware concurrency.
unsigned default_thread_count();

// Runs one cell. Replication i samples with seed base_seed + i; every
// estimator of that replication sees the same sample.
SimResult run_cell(const SimConfig& config, unsigned threads = 0);

// Runs several cells, sharing the sample, the Hill-type fit and the global
// bandwidth between cells with equal (dist, n, replications, base_seed, r).
// Results are reduced in replication order, so they do not depend on threads.
std::vector<SimResult> run_cells(const std::vector<SimConfig>& configs, unsigned threads = 0);

enum class TableId
{
  T3,
  T4,
  T6,
  T7
};

std::string table_number(TableId id);
std::optional<TableId> parse_table_id(std::string_view text);

struct TableOptions
{
  std::uint64_t base_seed = 1;
  // Replaces the table's replication count when set.
  std::optional<std::size_t> replications;
  WeibullLogBase weibull_log = WeibullLogBase::LnN;
  // Mean-excess tables only: place u at these quantile levels instead of C3 x.
  bool quantile_thresholds = false;
  unsigned threads = 0;
};

struct TableRun
{
  TableId id;
  TableOptions options;
  // Column blocks in display order; each block is one (n, C) pair.
  std::vector<std::string> block_labels;
  std::vector<std::string> row_labels;
  std::vector<EstimatorTag> estimators;
  // results[row * blocks + block]
  std::vector<SimResult> results;

  const SimResult& cell(std::size_t row, std::size_t block) const;
};

// The configurations of a table grid, in row-major (row, block) order.
std::vector<SimConfig> table_configs(TableId id, const TableOptions& options,
                                     std::vector<std::string>* row_labels = nullptr,
                                     std::vector<std::string>* block_labels = nullptr);

TableRun run_table(TableId id, const TableOptions& options = {});

// One printed row of a rate table: the row label and the formatted exponents.
struct RateRow
{
  std::string label;
  std::vector<std::string> cells;
};

// Hall-class rows ("c,l": NE PT PI) followed by Weibull rows ("kappa,C,C2": NE PT).
std::vector<RateRow> rate_table2_rows();
// Hall-class rows "c,l" with NE PT PI for u = n^{1/16}, n^{1/8}, n^{1/4}, n^{3/8}.
std::vector<RateRow> rate_table5_rows();
// Placeholder printed for a rate that does not apply.
inline constexpr const char* kNoRate = "--";

// Markdown rendering of the analytic rate tables (1, 2 and 5).
std::string render_rate_table1();
std::string render_rate_table2();
std::string render_rate_table5();
std::string run_rate_tables();

// ---- reporting ----

// Exponent rounded half away from zero to 3 decimals, printed without
// trailing zeros when the exponent is an exact 3-decimal number.
std::string format_rate(double value);
std::string format_rate(const RateExponent& rate);
// Table cell in the printed style: 3 decimals below 10, 4 significant digits
// below 10^4 and "a×10^k" beyond.
std::string format_cell(double value);

std::string render_markdown(const TableRun& run);
std::string render_csv(const TableRun& run);
std::string render_csv(const std::vector<SimResult>& results);
// Whitespace-separated columns for gnuplot: block, row, estimator, rel_mse, sd.
std::string render_plot_data(const TableRun& run);

struct WrittenFiles
{
  std::filesystem::path csv;
  std::filesystem::path markdown;
  std::filesystem::path plot_data;
};
// Writes table{N}_seed{S}.csv, .md and .dat into dir.
WrittenFiles write_table(const TableRun& run, const std::filesystem::path& dir);

} // namespace tailbench
