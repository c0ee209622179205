#include "doctest.h"

#include "tailbench/distributions.hpp"
#include "tailbench/errors.hpp"
#include "tailbench/kernel.hpp"
#include "tailbench/rng.hpp"
#include "tailbench/tail_index.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>

using namespace tailbench;

namespace {

const double kPi = std::acos(-1.0);

double integrate(const std::function<double(double)>& f, double a, double b)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x)
    v = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * rng.uniform_open());
  return x;
}

std::vector<double> pareto_sample(double alpha, std::size_t n, std::uint64_t seed)
{
  auto x = sample(GpdDist(1.0 / alpha, 1.0 / alpha), n, seed);
  for (double& v : x)
    v += 1.0;
  return x;
}

// The mean excess of the kernel density estimate by direct quadrature:
// int_0^inf t f_hat(t + u) dt / (1 - F_hat(u)), one Gaussian bump at a time.
double kernel_mef_by_quadrature(const std::vector<double>& x, double u, double h)
{
  const auto& k = gaussian_kernel();
  double numerator = 0.0;
  for (double xi : x) {
    const double centre = xi - u;
    const double lo = std::max(0.0, centre - 40.0 * h);
    const double hi = std::max(0.0, centre + 40.0 * h);
    if (hi > lo)
      numerator += integrate([&](double t) { return t * k.w((t - centre) / h) / h; }, lo, hi);
  }
  numerator /= static_cast<double>(x.size());
  const double tail = kernel_tail_raw(x, u, fixed_bandwidth(h));
  return numerator / tail;
}

} // namespace

TEST_CASE("Gaussian kernel constants agree with numeric integration")
{
  const auto& k = gaussian_kernel();
  const double mu2 = integrate([&](double z) { return z * z * k.w(z); }, -40.0, 40.0);
  const double psi = integrate([&](double z) { return z * k.W(z) * k.w(z); }, -40.0, 40.0);
  CHECK(k.mu2 == doctest::Approx(mu2).epsilon(1e-12));
  CHECK(k.psi == doctest::Approx(psi).epsilon(1e-12));
  CHECK(k.psi == doctest::Approx(0.2820948).epsilon(1e-7));
  CHECK(k.W(0.0) == 0.5);
  CHECK(k.w(1.3) == k.w(-1.3));
}

TEST_CASE("kernel_cdf examples")
{
  const std::vector<double> x{ 1.0, 2.0, 3.0 };
  for (double h : { 0.01, 0.5, 3.0, 100.0 })
    CHECK(kernel_cdf(x, 2.0, fixed_bandwidth(h)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kernel_cdf(x, 2.5, fixed_bandwidth(1e-8)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(kernel_tail_raw(x, 2.5, fixed_bandwidth(1e-8)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("kernel_cdf with a global bandwidth is monotone and has the right limits")
{
  const auto x = sample(BurrDist(1.0, 2.0), 500, 4);
  const Bandwidth h = al_bandwidth(x);
  double prev = -1.0;
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  for (int i = 0; i < 1000; ++i) {
    const double at = *mn - 1.0 + (*mx - *mn + 2.0) * i / 999.0;
    const double F = kernel_cdf(x, at, h);
    CHECK(F >= prev);
    prev = F;
  }
  CHECK(kernel_cdf(x, *mn - 41.0 * h.h, h) < 1e-12);
  CHECK(kernel_cdf(x, *mx + 41.0 * h.h, h) > 1.0 - 1e-12);
  CHECK(kernel_tail_raw(x, *mx + 41.0 * h.h, h) < 1e-12);
}

TEST_CASE("kernel_cdf is nearly unbiased at the 99% quantile of Burr(1,1)")
{
  const BurrDist d(1.0, 1.0);
  const double q = quantile(d, 0.99);
  const int reps = 200;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const auto x = sample(d, 10000, 1000 + i);
    const double F = kernel_cdf(x, q, al_bandwidth(x));
    s += F;
    s2 += F * F;
  }
  const double mean = s / reps;
  const double se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - 0.99) < 4.0 * se);
}

TEST_CASE("kernel_density examples")
{
  const auto& k = gaussian_kernel();
  CHECK(kernel_density(std::vector<double>{ 0.7 }, 0.7, fixed_bandwidth(1.0)) == doctest::Approx(0.3989423).epsilon(1e-7));
  const double a = 1.3, h = 0.6;
  CHECK(kernel_density(std::vector<double>{ -a, a }, 0.0, fixed_bandwidth(h)) == doctest::Approx(k.w(a / h) / h).epsilon(1e-14));

  const auto x = sample(WeibullDist(1.0, 2.0), 200, 3);
  const Bandwidth bw = fixed_bandwidth(0.2);
  const int grid = 20000;
  const double lo = -3.0, hi = 6.0, step = (hi - lo) / grid;
  double total = 0.0;
  for (int i = 0; i <= grid; ++i)
    total += (i == 0 || i == grid ? 0.5 : 1.0) * kernel_density(x, lo + i * step, bw);
  CHECK(std::abs(total * step - 1.0) < 1e-3);
}

TEST_CASE("pointwise bandwidth")
{
  const HallParams p(1.0, 1.0, -1.0, 1.0);
  const Bandwidth h = pointwise_bandwidth_true(p, 1000, 1.0);
  CHECK(h.h == doctest::Approx(std::cbrt(0.5 * 0.2820947917738781 / 1000.0)).epsilon(1e-12));
  CHECK(h.h == doctest::Approx(0.05206).epsilon(1e-4));
  CHECK(h.valid);
  CHECK(h.method == BandwidthMethod::PointwiseTrue);
  CHECK(pointwise_bandwidth_true(p, 1000, 2.0).h / h.h == doctest::Approx(std::pow(2.0, 4.0 / 3.0)).epsilon(1e-12));
  CHECK_FALSE(pointwise_bandwidth_true(p, 1000, 10.0).valid);
  CHECK_THROWS_AS(pointwise_bandwidth_true(p, 1000, 0.0), DomainError);

  const TailIndexEstimate exact{ 1.0, 1.0, 10, 1000 };
  CHECK(pointwise_bandwidth_plugin(exact, 1000, 1.0).h == doctest::Approx(h.h).epsilon(1e-15));
  const TailIndexEstimate est{ 1.7, 0.8, 10, 1000 };
  const double ratio = pointwise_bandwidth_plugin(est, 1000, 3.0).h / pointwise_bandwidth_plugin(est, 1000, 1.5).h;
  CHECK(ratio == doctest::Approx(std::pow(2.0, (1.7 + 3.0) / 3.0)).epsilon(1e-12));
}

TEST_CASE("plug-in pointwise bandwidth tracks the true one on Pareto samples")
{
  const double alpha = 2.0;
  const HallParams p(1.0, alpha, -1e-12, 1.0);
  const std::size_t n = 100000;
  const double x0 = 5.0;
  const double h_true = pointwise_bandwidth_true(p, n, x0).h;
  int inside = 0;
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    const auto x = pareto_sample(alpha, n, 300 + i);
    const double ratio = pointwise_bandwidth_plugin(hill_fit(x, default_r(n)), n, x0).h / h_true;
    inside += (ratio >= 0.5 && ratio <= 2.0) ? 1 : 0;
  }
  CHECK(inside >= 190);
}

TEST_CASE("global bandwidth on normal samples")
{
  const auto& k = gaussian_kernel();
  const double R = 1.0 / (4.0 * std::sqrt(kPi));
  const std::size_t n = 10000;
  const double h_opt = std::cbrt(2.0 * k.psi / (k.mu2 * k.mu2 * R * n));
  for (int seed = 0; seed < 100; ++seed) {
    const double ratio = al_bandwidth(normal_sample(n, 500 + seed)).h / h_opt;
    CHECK(ratio >= 0.7);
    CHECK(ratio <= 1.4);
  }
}

TEST_CASE("global bandwidth invariances and errors")
{
  const auto x = normal_sample(2000, 8);
  const double h = al_bandwidth(x).h;
  std::vector<double> shifted = x, scaled = x;
  for (double& v : shifted)
    v += 5.0;
  for (double& v : scaled)
    v *= 3.0;
  CHECK(al_bandwidth(shifted).h == doctest::Approx(h).epsilon(1e-12));
  CHECK(al_bandwidth(scaled).h == doctest::Approx(3.0 * h).epsilon(0.02));
  CHECK_THROWS_AS(al_bandwidth(std::vector<double>(20, 1.0)), DegenerateSampleError);
  CHECK_THROWS_AS(al_bandwidth(std::vector<double>{ 1.0, 2.0, 3.0 }), DomainError);
  CHECK(al_bandwidth(x).method == BandwidthMethod::GlobalAL);
}

TEST_CASE("mean-excess bandwidth")
{
  const HallParams p(1.0, 1.0, -1.0, 1.0);
  const Bandwidth h = mef_bandwidth_true(p, 1000, 1.0);
  CHECK(h.h == doctest::Approx(0.05206).epsilon(1e-4));
  CHECK(mef_bandwidth_true(p, 1000, 2.0).h / h.h == doctest::Approx(std::pow(2.0, 1.0 + 1.0 / 3.0)).epsilon(1e-12));
  CHECK(mef_bandwidth_plugin(TailIndexEstimate{ 1.0, 1.0, 10, 1000 }, 1000, 1.0).h == doctest::Approx(h.h).epsilon(1e-15));
  CHECK_THROWS_AS(mef_bandwidth_true(p, 1000, 0.0), DomainError);
  CHECK_FALSE(mef_bandwidth_true(p, 1000, 6.0).valid);
}

TEST_CASE("cap_to_range")
{
  const std::vector<double> x{ 1.0, 4.0, 2.0 };
  const Bandwidth capped = cap_to_range(fixed_bandwidth(10.0), x);
  CHECK(capped.h == 3.0);
  CHECK(capped.capped);
  const Bandwidth kept = cap_to_range(fixed_bandwidth(1.0), x);
  CHECK(kept.h == 1.0);
  CHECK_FALSE(kept.capped);
}

TEST_CASE("kernel_mef examples")
{
  CHECK(kernel_mef(std::vector<double>{ 2.0 }, 2.0, fixed_bandwidth(1.0)) == doctest::Approx(0.7978845608).epsilon(1e-9));
  CHECK(kernel_mef(std::vector<double>{ 6.0, 8.0 }, 5.0, fixed_bandwidth(1e-8)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_mef(std::vector<double>{ 0.1, 0.2, 0.3 }, 50.0, fixed_bandwidth(0.01)), NoExceedanceError);
}

TEST_CASE("kernel_mef closed form equals quadrature of its definition")
{
  for (int s = 0; s < 20; ++s) {
    const auto x = sample(BurrDist(2.0, 1.5), 50, 40 + s);
    const double u = quantile(BurrDist(2.0, 1.5), 0.8);
    const double h = 0.05 + 0.05 * s;
    const double closed = kernel_mef(x, u, fixed_bandwidth(h));
    CHECK(std::abs(closed - kernel_mef_by_quadrature(x, u, h)) < 1e-6 * closed);
  }
}

TEST_CASE("kernel CDF mean squared error follows its asymptotic expression")
{
  const BurrDist d(3.0, 1.0);
  const HallParams p = hall_params_of_burr(d);
  const std::size_t n = 1u << 16;
  const double x0 = 2.0;
  const Bandwidth h = pointwise_bandwidth_true(p, n, x0);
  const auto& k = gaussian_kernel();
  const double bias = h.h * h.h * pdf_derivative(d, x0) * k.mu2 / 2.0;
  const double predicted = bias * bias + tail_prob(d, x0) / n;
  const int reps = 2000;
  double mse = 0.0;
  for (int i = 0; i < reps; ++i) {
    const auto x = sample(d, n, 7000 + i);
    const double err = kernel_tail_raw(x, x0, h) - tail_prob(d, x0);
    mse += err * err;
  }
  mse /= reps;
  CHECK(mse < 2.0 * predicted);
  CHECK(mse > 0.5 * predicted);
}
