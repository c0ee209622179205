#pragma once

#include "tailbench/distributions.hpp"
#include "tailbench/kernel.hpp"

#include <array>
#include <optional>

namespace tailbench {

enum class NotApplicable
{
  BandwidthDiverges,
  AssumptionBroken
};

// Polynomial exponent of n in a convergence rate, optionally times (ln n)^log_power.
struct RateExponent
{
  std::optional<double> value;
  NotApplicable reason = NotApplicable::AssumptionBroken;
  int log_power = 0;

  bool applicable() const { return value.has_value(); }

  static RateExponent of(double v, int log_power = 0) { return { v, NotApplicable::AssumptionBroken, log_power }; }
  static RateExponent none(NotApplicable why) { return { std::nullopt, why, 0 }; }
};

struct RateSet
{
  RateExponent ne;
  RateExponent pt;
  RateExponent pi;
};

// delta = 1 / (2 beta + alpha): targets sit at x ~ C1 n^delta.
double delta(const HallParams& params);

// Relative-MSE rates of the three tail estimators at x ~ C1 n^delta.
// NE: delta alpha - 1 when beta > 3/2 (otherwise the optimal bandwidth
// diverges); PT: delta alpha - 1; PI: 2 delta alpha - 2 with a (ln n)^2 factor.
RateSet tail_rate_exponents(const HallParams& params);

// Weibull class at x ~ C2 (ln n)^{1/kappa}: NE and PT -1 + C C2^kappa; PI does not apply.
RateSet tail_rate_exponents(const WeibullTailParams& params, double C2);

// MSE rates of the mean excess estimators at u = n^p. NE: p(alpha+2) - 1 when
// p(alpha+3) <= 1; PT: p(alpha+2) - 1 when p(alpha + 2 beta) > 1;
// PI: 2p - 1 + alpha/(2 beta + alpha).
RateSet mef_rate_exponents(const HallParams& params, double p);

using Matrix2 = std::array<std::array<double, 2>, 2>;

// Asymptotic covariance of the scaled GPD maximum likelihood estimator,
// (1 + gamma) [[1 + gamma, -1], [-1, 2]]. This is the conventional choice for
// the otherwise unspecified Sigma_0 and can be replaced by callers.
Matrix2 gpd_scaled_covariance(double gamma);

// Kernel CDF estimator: {h^2 f'(x) mu2 / 2}^2 + S(x)/n with exact f', S.
double predict_kernel_cdf_mse(const Distribution& dist, double n, double x, double h,
                              const KernelSpec& k = gaussian_kernel());

// Piecing-together estimator, x = c1 u, sqrt(N) u^{-beta} -> c2:
//   [ B^2 {c1^{-beta} + c2 alpha (alpha+beta)^{-1} (alpha+beta+1)^{-1} (alpha-beta, alpha) nu}^2
//     + 1 + alpha^2 nu' Sigma0 nu ] / N,
// nu = (1/c1 - 1, alpha (ln c1 + 1/c1 - 1)).
double predict_pt_relmse(const HallParams& params, double c1, double c2, double N,
                         const std::optional<Matrix2>& sigma0 = {});
// The squared-bias part of the bracket above (before division by N).
double pt_relmse_bias(const HallParams& params, double c1, double c2);

// Far-tail variant (u = o(x)):
//   ln(1 + x/u)^2 [ B^2 {c2 alpha (alpha+beta)^{-1} (alpha+beta+1)^{-1} (alpha+1)(1-beta)}^2
//                   + alpha^2 (alpha+1)^2 ] / N.
double predict_pt_relmse_far(const HallParams& params, double c2, double N, double x_over_u);
double pt_relmse_far_bias(const HallParams& params, double c2);

// Weibull-class piecing-together, x = u (1 + c3 (kappa C)^{-1} u^{-kappa}):
//   [ c3^2 c5^2 {-(4 - k(1-k)) + c3 (5 + 2k(1-k))/2 + c3^2 (2 + k(1-k))/6 - c3^3/8}^2
//     + 1 + 2 c3^2 - c3^3 + c3^4/4 ] / N.
double predict_pt_relmse_weibull(const WeibullTailParams& params, double c3, double c5, double N);

// Plug-in tail estimator with the optimal r, ln x / ln n -> c6:
//   s^{-1} A^2 alpha^2 / (2 beta (alpha + 2 beta)) {c6 (alpha + 2 beta) - 1}^2 n^{-2} (ln n)^2.
double predict_pi_tail_mse(const HallParams& params, double n, double c6);

// Kernel mean excess estimator, Hall class with alpha > 2:
//   h^4 mu2^2 alpha^2 (alpha-1)^{-2} u^{-2}
//   + n^{-1} 2 A^{-1} (alpha-1)^{-2} u^{alpha+2} {(alpha-1)/(alpha-2) - alpha h psi / u}.
double predict_kernel_mef_mse(const HallParams& params, double n, double u, double h,
                              const KernelSpec& k = gaussian_kernel());

// Weibull class: only orders of magnitude are known (h^4 mu2^2 u^{4 kappa - 2}
// and u^2 exp(C u^kappa) / n); never compare these against data.
struct MseEnvelope
{
  double bias_order;
  double variance_order;
};
MseEnvelope kernel_mef_mse_envelope(const WeibullTailParams& params, double n, double u, double h,
                                    const KernelSpec& k = gaussian_kernel());

// GPD mean excess estimator. e_u is the true mean excess at u and N_star = n S(u).
double predict_pe_mse(const HallParams& params, double u, double n, double N_star, double e_u);
double predict_pe_mse(const WeibullTailParams& params, double u, double n, double N_star);
// Asymptotic variance e^2 (1+gamma)(1-gamma)^2 (2 gamma^2 - gamma + 1) of sqrt(N*) (e - e_hat).
double pe_asymptotic_variance(const HallParams& params, double e_u);

// Plug-in mean excess estimator with r ~ s n^{2 beta/(2 beta + alpha)}:
//   u^2 n^{-1 + alpha/(2 beta + alpha)} alpha^2 (alpha-1)^{-4}
//   (A^{-2 beta/alpha} B^2 beta^2 (alpha+beta)^{-2} s^{2 beta/alpha} + s^{-1}).
double predict_pi_mef_mse(const HallParams& params, double u, double n, double s);

} // namespace tailbench
