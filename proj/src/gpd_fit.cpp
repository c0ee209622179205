#include "tailbench/gpd_fit.hpp"

#include "tailbench/errors.hpp"
#include "tailbench/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tailbench {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate
{
  double gamma;
  double log_scale;
  double loglik;
  bool converged;
};

// Runs the simplex from start, restarting at the incumbent until it settles.
Candidate maximize(std::span<const double> y, double gamma0, double log_scale0)
{
  auto objective = [&](const std::vector<double>& t) {
    return -gpd_loglik({ t[0], std::exp(t[1]) }, y);
  };
  SimplexOptions options;
  std::vector<double> start{ gamma0, log_scale0 };
  SimplexResult result = nelder_mead(objective, start, options);
  for (int restart = 0; restart < 3; ++restart) {
    options.initial_step = 1e-3;
    SimplexResult again = nelder_mead(objective, result.argmin, options);
    const bool settled = again.converged && again.value >= result.value - 1e-9 * (1.0 + std::abs(result.value));
    if (again.value <= result.value)
      result = std::move(again);
    if (settled)
      break;
  }
  return { result.argmin[0], result.argmin[1], -result.value, result.converged };
}

// Profile maximization over ln c with gamma held fixed.
Candidate maximize_scale(std::span<const double> y, double gamma, double log_scale0)
{
  auto objective = [&](const std::vector<double>& t) { return -gpd_loglik({ gamma, std::exp(t[0]) }, y); };
  SimplexOptions options;
  SimplexResult result = nelder_mead(objective, { log_scale0 }, options);
  options.initial_step = 1e-3;
  SimplexResult again = nelder_mead(objective, result.argmin, options);
  if (again.value <= result.value)
    result = std::move(again);
  return { gamma, result.argmin[0], -result.value, result.converged };
}

// Newton steps on the analytic score, started from a simplex optimum. The
// simplex resolves the optimum only to about sqrt(eps |loglik|), so the score
// there grows with the sample size; a few Newton steps bring it to rounding
// level. A step is kept only when it does not lower the likelihood.
Candidate polish(std::span<const double> y, Candidate c, bool fix_gamma)
{
  auto score = [&](double g, double lc) { return score_at({ g, std::exp(lc) }, y); };
  for (int iter = 0; iter < 8; ++iter) {
    std::array<double, 2> s;
    try {
      s = score(c.gamma, c.log_scale);
    } catch (const DomainError&) {
      break;
    }
    const double hg = 1e-6 * std::max(1.0, std::abs(c.gamma));
    const double hc = 1e-6 * std::max(1.0, std::abs(c.log_scale));
    double step_g = 0.0, step_c = 0.0;
    try {
      const auto sc_plus = score(c.gamma, c.log_scale + hc);
      const auto sc_minus = score(c.gamma, c.log_scale - hc);
      const double h11 = (sc_plus[1] - sc_minus[1]) / (2 * hc);
      if (fix_gamma) {
        if (!(h11 < 0.0))
          break;
        step_c = -s[1] / h11;
      } else {
        const auto sg_plus = score(c.gamma + hg, c.log_scale);
        const auto sg_minus = score(c.gamma - hg, c.log_scale);
        const double h00 = (sg_plus[0] - sg_minus[0]) / (2 * hg);
        const double h01 = 0.5 * ((sg_plus[1] - sg_minus[1]) / (2 * hg) + (sc_plus[0] - sc_minus[0]) / (2 * hc));
        const double det = h00 * h11 - h01 * h01;
        // Only take steps where the Hessian is negative definite.
        if (!(h00 < 0.0) || !(det > 0.0))
          break;
        step_g = -(h11 * s[0] - h01 * s[1]) / det;
        step_c = -(h00 * s[1] - h01 * s[0]) / det;
      }
    } catch (const DomainError&) {
      break;
    }
    const double g = c.gamma + step_g;
    const double lc = c.log_scale + step_c;
    const double ll = gpd_loglik({ g, std::exp(lc) }, y);
    if (!std::isfinite(ll) || !std::isfinite(g) || ll < c.loglik - 1e-12 * (1.0 + std::abs(c.loglik)))
      break;
    const bool tiny = std::abs(step_g) < 1e-14 && std::abs(step_c) < 1e-14;
    c.gamma = g;
    c.log_scale = lc;
    c.loglik = std::max(c.loglik, ll);
    if (tiny)
      break;
  }
  return c;
}

} // namespace

double gpd_tail(const GpdParams& p, double y)
{
  if (y <= 0.0)
    return 1.0;
  if (std::abs(p.gamma) < kGammaZeroBand)
    return std::exp(-y / p.scale);
  const double z = p.gamma * y / p.scale;
  if (z <= -1.0)
    return 0.0;
  return std::exp(-std::log1p(z) / p.gamma);
}

double gpd_loglik(const GpdParams& p, std::span<const double> excesses)
{
  if (excesses.empty())
    throw DomainError("GPD likelihood needs at least one excess");
  if (!(p.scale > 0.0) || !std::isfinite(p.scale) || !std::isfinite(p.gamma))
    return kNegInf;
  const double n = static_cast<double>(excesses.size());
  if (std::abs(p.gamma) < kGammaZeroBand) {
    const double total = std::accumulate(excesses.begin(), excesses.end(), 0.0);
    return -n * std::log(p.scale) - total / p.scale;
  }
  const double ratio = p.gamma / p.scale;
  double sum = 0.0;
  for (double y : excesses) {
    const double z = ratio * y;
    if (z <= -1.0)
      return kNegInf;
    sum += std::log1p(z);
  }
  return -n * std::log(p.scale) - (1.0 + 1.0 / p.gamma) * sum;
}

std::array<double, 2> score_at(const GpdParams& p, std::span<const double> excesses)
{
  if (excesses.empty())
    throw DomainError("GPD score needs at least one excess");
  if (!(p.scale > 0.0))
    throw DomainError("GPD scale must be positive");
  const double g = p.gamma;
  double d_gamma = 0.0;
  double d_log_scale = -static_cast<double>(excesses.size());
  for (double y : excesses) {
    const double t = y / p.scale;
    const double z = g * t;
    if (z <= -1.0)
      throw DomainError("excess lies outside the GPD support");
    d_log_scale += (1.0 + g) * t / (1.0 + z);
    if (std::abs(g) < kGammaZeroBand)
      d_gamma += 0.5 * t * t - t + g * (t * t - 2.0 * t * t * t / 3.0);
    else
      d_gamma += std::log1p(z) / (g * g) - (1.0 + 1.0 / g) * t / (1.0 + z);
  }
  return { d_gamma, d_log_scale };
}

std::vector<double> excesses_over(std::span<const double> sample, double u)
{
  std::vector<double> y;
  for (double x : sample)
    if (x > u)
      y.push_back(x - u);
  return y;
}

PotFit fit_excesses(std::span<const double> y, double u, bool constrain_gamma_lt_1)
{
  const std::size_t n = y.size();
  if (n < 2)
    throw InsufficientExceedancesError("POT fit needs at least two exceedances");

  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  double ss = 0.0;
  for (double v : y)
    ss += (v - mean) * (v - mean);
  const double var = ss / (nd - 1.0);
  if (!(mean > 0.0))
    throw DegenerateSampleError("all excesses are zero");

  std::vector<Candidate> runs;
  // Exponential start: gamma = 0, scale = mean excess.
  runs.push_back(maximize(y, 0.0, std::log(mean)));
  // Method-of-moments start.
  if (var > 0.0) {
    const double m2v = mean * mean / var;
    const double g0 = 0.5 * (1.0 - m2v);
    const double c0 = 0.5 * mean * (m2v + 1.0);
    if (std::isfinite(g0) && c0 > 0.0 && std::isfinite(c0))
      runs.push_back(maximize(y, g0, std::log(c0)));
  }
  Candidate best = *std::max_element(runs.begin(), runs.end(),
                                     [](const Candidate& a, const Candidate& b) { return a.loglik < b.loglik; });

  best = polish(y, best, false);

  bool boundary = false;
  if (constrain_gamma_lt_1 && best.gamma >= kConstrainedGammaMax) {
    best = polish(y, maximize_scale(y, kConstrainedGammaMax, best.log_scale), true);
    boundary = true;
  }

  GpdParams params{ best.gamma, std::exp(best.log_scale) };
  return { params, u, n, gpd_loglik(params, y), best.converged, constrain_gamma_lt_1, boundary };
}

PotFit fit_pot(std::span<const double> sample, double u, bool constrain_gamma_lt_1)
{
  const std::vector<double> y = excesses_over(sample, u);
  return fit_excesses(y, u, constrain_gamma_lt_1);
}

} // namespace tailbench
