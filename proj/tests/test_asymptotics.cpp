#include "doctest.h"

#include "tailbench/asymptotics.hpp"
#include "tailbench/errors.hpp"
#include "tailbench/simulation.hpp"
#include "tailbench/tail_index.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>

using namespace tailbench;

namespace {

HallParams burr_params(double c, double ell)
{
  return hall_params_of_burr(BurrDist(c, ell));
}

// Minimizes the kernel mean-excess MSE over h on a log scale. The h-free
// variance constant is subtracted so the objective keeps full precision.
double argmin_kernel_mef_mse(const HallParams& p, double n, double u)
{
  const double f0 = predict_kernel_mef_mse(p, n, u, 0.0);
  const double guess = mef_bandwidth_true(p, static_cast<std::size_t>(n), u).h;
  auto f = [&](double t) { return (predict_kernel_mef_mse(p, n, u, std::exp(t)) - f0) / std::pow(guess, 4); };
  const auto [t, value] =
      boost::math::tools::brent_find_minima(f, std::log(guess) - 5.0, std::log(guess) + 5.0, 52);
  (void)value;
  return std::exp(t);
}

} // namespace

TEST_CASE("delta")
{
  CHECK(delta(burr_params(1.0, 1.0)) == doctest::Approx(1.0 / 3.0));
  CHECK(delta(burr_params(3.0, 3.0)) == doctest::Approx(1.0 / 15.0));
  CHECK(delta(HallParams(1.0, 3.0, -1.0, 3.0)) == doctest::Approx(1.0 / 9.0));
  CHECK(delta(burr_params(3.0, 0.5)) == doctest::Approx(2.0 / 15.0));
}

TEST_CASE("tail rate exponents")
{
  auto r = tail_rate_exponents(burr_params(1.0, 1.0));
  CHECK_FALSE(r.ne.applicable());
  CHECK(r.ne.reason == NotApplicable::BandwidthDiverges);
  CHECK(format_rate(r.pt) == "-0.667");
  CHECK(format_rate(r.pi) == "-1.333");
  CHECK(r.pi.log_power == 2);

  r = tail_rate_exponents(burr_params(3.0, 0.5));
  CHECK(format_rate(r.ne) == "-0.8");
  CHECK(format_rate(r.pt) == "-0.8");
  CHECK(format_rate(r.pi) == "-1.6");

  r = tail_rate_exponents(WeibullTailParams(1.0, 0.5), 0.2);
  CHECK(*r.ne.value == doctest::Approx(-1.0 + std::sqrt(0.2)));
  CHECK(format_rate(r.ne) == "-0.553");
  CHECK(format_rate(r.pt) == "-0.553");
  CHECK_FALSE(r.pi.applicable());
  CHECK(r.pi.reason == NotApplicable::AssumptionBroken);
}

TEST_CASE("mean excess rate exponents")
{
  auto r = mef_rate_exponents(burr_params(1.0, 1.0), 1.0 / 16.0);
  CHECK(format_rate(r.ne) == "-0.813");
  CHECK_FALSE(r.pt.applicable());
  CHECK(format_rate(r.pi) == "-0.542");
  r = mef_rate_exponents(burr_params(1.0, 1.0), 3.0 / 8.0);
  CHECK(format_rate(r.pt) == "0.125");
  r = mef_rate_exponents(burr_params(3.0, 3.0), 1.0 / 16.0);
  CHECK(format_rate(r.ne) == "-0.313");
  r = mef_rate_exponents(burr_params(3.0, 3.0), 1.0 / 4.0);
  CHECK(format_rate(r.pt) == "1.75");
}

TEST_CASE("rate formatting")
{
  CHECK(format_rate(-1.0) == "-1");
  CHECK(format_rate(-2.0 / 3.0) == "-0.667");
  CHECK(format_rate(0.3125) == "0.313");
  CHECK(format_rate(-0.3125) == "-0.313");
  CHECK(format_rate(-0.8) == "-0.8");
  CHECK(format_rate(RateExponent::none(NotApplicable::BandwidthDiverges)) == kNoRate);
}

TEST_CASE("GPD scaled covariance is symmetric positive definite")
{
  for (double g : { -0.25, 0.0, 0.5, 0.9 }) {
    const Matrix2 s = gpd_scaled_covariance(g);
    CHECK(s[0][1] == s[1][0]);
    CHECK(s[0][0] > 0.0);
    CHECK(s[0][0] * s[1][1] - s[0][1] * s[1][0] > 0.0);
  }
  CHECK(gpd_scaled_covariance(0.0)[0][0] == 1.0);
  CHECK(gpd_scaled_covariance(0.0)[1][1] == 2.0);
}

TEST_CASE("kernel CDF MSE prediction")
{
  const BurrDist d(3.0, 1.0);
  CHECK(predict_kernel_cdf_mse(d, 1000.0, 2.0, 0.0) == doctest::Approx(tail_prob(d, 2.0) / 1000.0).epsilon(1e-14));
  const double h = 0.1;
  const double bias = h * h * pdf_derivative(d, 2.0) / 2.0;
  CHECK(predict_kernel_cdf_mse(d, 1000.0, 2.0, h) ==
        doctest::Approx(bias * bias + tail_prob(d, 2.0) / 1000.0).epsilon(1e-14));
}

TEST_CASE("piecing-together relative MSE")
{
  const HallParams p(1.0, 2.0, -1.5, 0.7);
  // c1 = 1 makes nu vanish.
  CHECK(predict_pt_relmse(p, 1.0, 0.8, 50.0) == doctest::Approx((p.B * p.B + 1.0) / 50.0).epsilon(1e-14));
  CHECK(predict_pt_relmse(p, 3.0, 0.8, 1e12) < 1e-10);

  // Far-tail bias carries the factor (1 - beta): zero at beta = 1.
  for (double a : { 0.5, 1.0, 3.0 })
    for (double c2 : { 0.1, 1.0, 5.0 })
      CHECK(pt_relmse_far_bias(HallParams(1.0, a, -1.0, 1.0), c2) == 0.0);
  CHECK(pt_relmse_far_bias(HallParams(1.0, 1.0, -1.0, 2.0), 1.0) > 0.0);

  // At finite c1 the bias does not cancel at beta = 1: alpha = beta = 1,
  // c1 = 2, c2 = 1 gives {1/2 + (1/6)(ln 2 - 1/2)}^2 B^2.
  const double expected = std::pow(0.5 + (std::log(2.0) - 0.5) / 6.0, 2);
  CHECK(pt_relmse_bias(HallParams(1.0, 1.0, -1.0, 1.0), 2.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));

  // Sigma0 is replaceable: the zero matrix drops the quadratic term.
  const Matrix2 zero{};
  const double no_sigma = predict_pt_relmse(p, 2.0, 0.8, 1.0, zero);
  CHECK(no_sigma == doctest::Approx(pt_relmse_bias(p, 2.0, 0.8) + 1.0).epsilon(1e-14));
}

TEST_CASE("Weibull piecing-together relative MSE")
{
  const WeibullTailParams w(1.0, 1.0);
  CHECK(predict_pt_relmse_weibull(w, 1e-9, 0.0, 10.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(predict_pt_relmse_weibull(w, 1.0, 0.0, 10.0) == doctest::Approx(0.225).epsilon(1e-14));
  CHECK(predict_pt_relmse_weibull(w, 2.0, 0.0, 10.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("plug-in tail MSE")
{
  const HallParams unit(1.0, 1.0, -1.0, 1.0);
  const double e = std::exp(1.0);
  const double expected = 0.5 * std::pow(2.0, -1.0 / 3.0) * (1.0 / 3.0) * 4.0 * std::exp(-2.0);
  CHECK(predict_pi_tail_mse(unit, e, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(predict_pi_tail_mse(unit, 1e4, 1.0 / 3.0) == 0.0);
  // Doubling A: factor 4 from A^2 times s(A)/s(2A).
  const HallParams doubled(2.0, 1.0, -1.0, 1.0);
  const double ratio = predict_pi_tail_mse(doubled, 1e4, 0.5) / predict_pi_tail_mse(unit, 1e4, 0.5);
  CHECK(ratio == doctest::Approx(4.0 * optimal_r_constant(unit) / optimal_r_constant(doubled)).epsilon(1e-12));
  // B = 0 leaves s undefined.
  CHECK_THROWS_AS(HallParams(1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("kernel mean-excess MSE")
{
  const HallParams p(1.0, 3.0, -1.0, 1.0);
  const double n = 1e5, u = 5.0;
  const double variance = 2.0 / (4.0 * n) * std::pow(u, 5.0) * 2.0;
  CHECK(predict_kernel_mef_mse(p, n, u, 0.0) == doctest::Approx(variance).epsilon(1e-14));
  CHECK(predict_kernel_mef_mse(p, n, 2.0 * u, 0.0) / predict_kernel_mef_mse(p, n, u, 0.0) ==
        doctest::Approx(std::pow(2.0, 5.0)).epsilon(1e-13));
  CHECK_THROWS_AS(predict_kernel_mef_mse(HallParams(1.0, 2.0, -1.0, 1.0), n, u, 0.1), DomainError);
  const auto env = kernel_mef_mse_envelope(WeibullTailParams(1.0, 1.0), n, u, 0.1);
  CHECK(env.variance_order == doctest::Approx(u * u * std::exp(u) / n));
}

TEST_CASE("numeric minimization of the kernel mean-excess MSE recovers the closed-form bandwidth")
{
  for (double a : { 2.5, 3.0, 9.0 })
    for (double u : { 2.0, 5.0, 10.0 })
      for (double n : { 1e3, 1e5, 1e7 }) {
        const HallParams p(1.3, a, -1.0, 1.0);
        const double closed = mef_bandwidth_true(p, static_cast<std::size_t>(n), u).h;
        const double numeric = argmin_kernel_mef_mse(p, n, u);
        CHECK(std::abs(numeric / closed - 1.0) < 1e-6);
      }
}

TEST_CASE("GPD mean-excess MSE")
{
  // gamma = 1/2, e(u) = 2: 4 (3/2)(1/4)(1) = 1.5.
  const HallParams half(1.0, 2.0, -1.0, 1.0);
  CHECK(pe_asymptotic_variance(half, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
  // The Weibull mean bias carries the factor (kappa - 1).
  CHECK(predict_pe_mse(WeibullTailParams(1.0, 1.0), 3.0, 1e4, 100.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(predict_pe_mse(WeibullTailParams(1.0, 2.0), 3.0, 1e4, 100.0) > 0.0);
  // Hall: lambda vanishes as u grows, leaving the variance.
  const double big_u = 1e6;
  CHECK(predict_pe_mse(half, big_u, 1e4, 50.0, 2.0) == doctest::Approx(1.5 / 50.0).epsilon(1e-6));
  CHECK_THROWS_AS(predict_pe_mse(HallParams(1.0, 1.0, -1.0, 1.0), 3.0, 1e4, 10.0, 1.0), DomainError);
}

TEST_CASE("plug-in mean-excess MSE")
{
  const double s = 1.7;
  const HallParams tiny_b(1.0, 3.0, -1e-12, 1.0);
  const double u = 4.0, n = 1e5;
  const double variance_only = u * u * std::pow(n, -1.0 + 3.0 / 5.0) * 9.0 / 16.0 / s;
  CHECK(predict_pi_mef_mse(tiny_b, u, n, s) == doctest::Approx(variance_only).epsilon(1e-12));
  CHECK_THROWS_AS(predict_pi_mef_mse(tiny_b, u, n, 0.0), DomainError);
}
