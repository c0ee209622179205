#include "tailbench/asymptotics.hpp"

#include "tailbench/errors.hpp"
#include "tailbench/tail_index.hpp"

#include <cmath>

namespace tailbench {

double delta(const HallParams& p)
{
  return 1.0 / (2.0 * p.beta + p.alpha);
}

RateSet tail_rate_exponents(const HallParams& p)
{
  const double da = delta(p) * p.alpha;
  RateSet set{ RateExponent::of(da - 1.0), RateExponent::of(da - 1.0), RateExponent::of(2.0 * da - 2.0, 2) };
  // The pointwise bandwidth shrinks only when (alpha + 3) delta < 1, i.e. beta > 3/2.
  if (!(p.beta > 1.5))
    set.ne = RateExponent::none(NotApplicable::BandwidthDiverges);
  return set;
}

RateSet tail_rate_exponents(const WeibullTailParams& p, double C2)
{
  if (!(C2 > 0.0))
    throw DomainError("C2 must be positive");
  const double rate = -1.0 + p.C * std::pow(C2, p.kappa);
  return { RateExponent::of(rate), RateExponent::of(rate), RateExponent::none(NotApplicable::AssumptionBroken) };
}

RateSet mef_rate_exponents(const HallParams& p, double power)
{
  if (!(power > 0.0))
    throw DomainError("threshold exponent p must be positive");
  const double common = power * (p.alpha + 2.0) - 1.0;
  RateSet set{ RateExponent::of(common), RateExponent::of(common),
               RateExponent::of(2.0 * power - 1.0 + p.alpha / (2.0 * p.beta + p.alpha)) };
  // The boundary p(alpha + 3) = 1 keeps h* bounded and is still tabulated.
  if (!(power * (p.alpha + 3.0) <= 1.0 + 1e-12))
    set.ne = RateExponent::none(NotApplicable::BandwidthDiverges);
  if (!(power * (p.alpha + 2.0 * p.beta) > 1.0))
    set.pt = RateExponent::none(NotApplicable::AssumptionBroken);
  return set;
}

Matrix2 gpd_scaled_covariance(double gamma)
{
  const double f = 1.0 + gamma;
  return { { { f * (1.0 + gamma), -f }, { -f, 2.0 * f } } };
}

double predict_kernel_cdf_mse(const Distribution& dist, double n, double x, double h, const KernelSpec& k)
{
  const double bias = h * h * pdf_derivative(dist, x) * k.mu2 / 2.0;
  return bias * bias + tail_prob(dist, x) / n;
}

namespace {

std::array<double, 2> pt_nu(const HallParams& p, double c1)
{
  return { 1.0 / c1 - 1.0, p.alpha * (std::log(c1) + 1.0 / c1 - 1.0) };
}

void require_pt_inputs(double c1, double N)
{
  if (!(c1 >= 1.0))
    throw DomainError("c1 = x/u must be >= 1");
  if (!(N > 0.0))
    throw DomainError("N must be positive");
}

} // namespace

double pt_relmse_bias(const HallParams& p, double c1, double c2)
{
  const auto nu = pt_nu(p, c1);
  const double a = p.alpha;
  const double b = p.beta;
  const double projection = (a - b) * nu[0] + a * nu[1];
  const double bracket = std::pow(c1, -b) + c2 * a / ((a + b) * (a + b + 1.0)) * projection;
  return p.B * p.B * bracket * bracket;
}

double predict_pt_relmse(const HallParams& p, double c1, double c2, double N, const std::optional<Matrix2>& sigma0)
{
  require_pt_inputs(c1, N);
  const auto nu = pt_nu(p, c1);
  const Matrix2 s = sigma0.value_or(gpd_scaled_covariance(p.gamma_of()));
  const double quad = nu[0] * (s[0][0] * nu[0] + s[0][1] * nu[1]) + nu[1] * (s[1][0] * nu[0] + s[1][1] * nu[1]);
  return (pt_relmse_bias(p, c1, c2) + 1.0 + p.alpha * p.alpha * quad) / N;
}

double pt_relmse_far_bias(const HallParams& p, double c2)
{
  const double a = p.alpha;
  const double b = p.beta;
  const double bracket = c2 * a / ((a + b) * (a + b + 1.0)) * (a + 1.0) * (1.0 - b);
  return p.B * p.B * bracket * bracket;
}

double predict_pt_relmse_far(const HallParams& p, double c2, double N, double x_over_u)
{
  if (!(N > 0.0) || !(x_over_u > 0.0))
    throw DomainError("N and x/u must be positive");
  const double log_ratio = std::log1p(x_over_u);
  const double variance = p.alpha * p.alpha * (p.alpha + 1.0) * (p.alpha + 1.0);
  return log_ratio * log_ratio * (pt_relmse_far_bias(p, c2) + variance) / N;
}

double predict_pt_relmse_weibull(const WeibullTailParams& p, double c3, double c5, double N)
{
  if (!(c3 > 0.0) || !(N > 0.0))
    throw DomainError("c3 and N must be positive");
  const double kk = p.kappa * (1.0 - p.kappa);
  const double poly = -(4.0 - kk) + 0.5 * c3 * (5.0 + 2.0 * kk) + c3 * c3 * (2.0 + kk) / 6.0 - c3 * c3 * c3 / 8.0;
  const double bias = c3 * c3 * c5 * c5 * poly * poly;
  const double variance = 1.0 + 2.0 * c3 * c3 - c3 * c3 * c3 + 0.25 * c3 * c3 * c3 * c3;
  return (bias + variance) / N;
}

double predict_pi_tail_mse(const HallParams& p, double n, double c6)
{
  if (!(n > 1.0))
    throw DomainError("n must exceed 1");
  const double s = optimal_r_constant(p);
  const double a = p.alpha;
  const double b = p.beta;
  const double gap = c6 * (a + 2.0 * b) - 1.0;
  const double log_n = std::log(n);
  return 0.5 / s * p.A * p.A * a * a / (b * (a + 2.0 * b)) * gap * gap * log_n * log_n / (n * n);
}

double predict_kernel_mef_mse(const HallParams& p, double n, double u, double h, const KernelSpec& k)
{
  const double a = p.alpha;
  if (!(a > 2.0))
    throw DomainError("the kernel mean-excess variance term needs alpha > 2 (factor 1/(alpha - 2))");
  if (!(u > 0.0) || !(n > 0.0) || !(h >= 0.0))
    throw DomainError("u, n must be positive and h nonnegative");
  const double am1 = a - 1.0;
  const double bias = std::pow(h, 4) * k.mu2 * k.mu2 * a * a / (am1 * am1 * u * u);
  const double variance =
    2.0 / (p.A * am1 * am1) * std::pow(u, a + 2.0) * (am1 / (a - 2.0) - a * h / u * k.psi) / n;
  return bias + variance;
}

MseEnvelope kernel_mef_mse_envelope(const WeibullTailParams& p, double n, double u, double h, const KernelSpec& k)
{
  return { std::pow(h, 4) * k.mu2 * k.mu2 * std::pow(u, 4.0 * p.kappa - 2.0),
           u * u * std::exp(p.C * std::pow(u, p.kappa)) / n };
}

double pe_asymptotic_variance(const HallParams& p, double e_u)
{
  const double g = p.gamma_of();
  return e_u * e_u * (1.0 + g) * (1.0 - g) * (1.0 - g) * (2.0 * g * g - g + 1.0);
}

double predict_pe_mse(const HallParams& p, double u, double n, double N_star, double e_u)
{
  if (!(p.alpha > 1.0))
    throw DomainError("the mean excess exists only for alpha > 1");
  if (!(N_star > 0.0) || !(u > 0.0))
    throw DomainError("N* and u must be positive");
  const double a = p.alpha;
  const double b = p.beta;
  const double g = p.gamma_of();
  const double lambda = std::sqrt(n) * (-std::sqrt(p.A) * p.B * b / (a + b) * std::pow(u, -a / 2.0 - b));
  const double shape = 1.0 + g / (1.0 - g) * (1.0 - b) / (a + b + 1.0);
  const double mean_term = lambda * e_u * (1.0 + g) * shape;
  return (mean_term * mean_term + pe_asymptotic_variance(p, e_u)) / N_star;
}

double predict_pe_mse(const WeibullTailParams& p, double u, double n, double N_star)
{
  if (!(N_star > 0.0) || !(u > 0.0))
    throw DomainError("N* and u must be positive");
  const double ck = p.C * p.kappa;
  const double lambda = std::sqrt(n) / (ck * ck) * std::pow(u, -2.0 * p.kappa) * std::exp(-0.5 * p.C * std::pow(u, p.kappa));
  const double mean_term = lambda * u * (p.kappa - 1.0);
  const double variance = std::pow(u, 2.0 * (1.0 - p.kappa)) / (ck * ck);
  return (mean_term * mean_term + variance) / N_star;
}

double predict_pi_mef_mse(const HallParams& p, double u, double n, double s)
{
  const double a = p.alpha;
  const double b = p.beta;
  if (!(a > 1.0))
    throw DomainError("the mean excess exists only for alpha > 1");
  if (!(s > 0.0))
    throw DomainError("r constant s must be positive");
  const double am1 = a - 1.0;
  const double bias = std::pow(p.A, -2.0 * b / a) * p.B * p.B * b * b / ((a + b) * (a + b)) * std::pow(s, 2.0 * b / a);
  return u * u * std::pow(n, -1.0 + a / (2.0 * b + a)) * a * a / std::pow(am1, 4) * (bias + 1.0 / s);
}

} // namespace tailbench
