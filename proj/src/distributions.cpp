#include "tailbench/distributions.hpp"

#include "tailbench/errors.hpp"
#include "tailbench/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace tailbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what)
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(what) + " must be a positive finite number");
}

void require_nonneg_x(double x)
{
  if (!(x >= 0.0))
    throw DomainError("evaluation point must be >= 0");
}

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log S(x) for each family; x is inside the support.
double log_tail(const BurrDist& d, double x)
{
  return -d.ell * std::log1p(std::pow(x, d.c));
}

double log_tail(const WeibullDist& d, double x)
{
  return -d.C * std::pow(x, d.kappa);
}

double log_tail(const GpdDist& d, double x)
{
  if (d.gamma == 0.0)
    return -x / d.scale;
  const double z = d.gamma * x / d.scale;
  if (z <= -1.0)
    return -kInf;
  return -std::log1p(z) / d.gamma;
}

// Inverse survival function S^{-1}(q), 0 < q < 1.
double inverse_tail(const BurrDist& d, double q)
{
  return std::pow(std::expm1(-std::log(q) / d.ell), 1.0 / d.c);
}

double inverse_tail(const WeibullDist& d, double q)
{
  return std::pow(-std::log(q) / d.C, 1.0 / d.kappa);
}

double inverse_tail(const GpdDist& d, double q)
{
  if (d.gamma == 0.0)
    return -d.scale * std::log(q);
  return d.scale / d.gamma * std::expm1(-d.gamma * std::log(q));
}

} // namespace

BurrDist::BurrDist(double c_, double ell_)
  : c(c_)
  , ell(ell_)
{
  require_positive(c, "Burr c");
  require_positive(ell, "Burr ell");
}

WeibullDist::WeibullDist(double C_, double kappa_)
  : C(C_)
  , kappa(kappa_)
{
  require_positive(C, "Weibull C");
  require_positive(kappa, "Weibull kappa");
}

GpdDist::GpdDist(double gamma_, double scale_)
  : gamma(gamma_)
  , scale(scale_)
{
  if (!std::isfinite(gamma))
    throw DomainError("GPD gamma must be finite");
  require_positive(scale, "GPD scale");
}

double GpdDist::upper() const
{
  return gamma < 0.0 ? -scale / gamma : kInf;
}

HallParams::HallParams(double A_, double alpha_, double B_, double beta_)
  : A(A_)
  , alpha(alpha_)
  , B(B_)
  , beta(beta_)
{
  require_positive(A, "Hall A");
  require_positive(alpha, "Hall alpha");
  if (B == 0.0 || !std::isfinite(B))
    throw DomainError("Hall B must be nonzero and finite");
  if (!(beta >= 0.5) || !std::isfinite(beta))
    throw DomainError("Hall beta must be >= 1/2");
}

WeibullTailParams::WeibullTailParams(double C_, double kappa_)
  : C(C_)
  , kappa(kappa_)
{
  require_positive(C, "Weibull-class C");
  require_positive(kappa, "Weibull-class kappa");
}

double tail_prob(const Distribution& dist, double x)
{
  require_nonneg_x(x);
  return std::visit(
    [x](const auto& d) -> double {
      using D = std::decay_t<decltype(d)>;
      if constexpr (std::is_same_v<D, GpdDist>) {
        if (x > d.upper())
          throw DomainError("point lies outside the GPD support");
      }
      return std::exp(log_tail(d, x));
    },
    dist);
}

double cdf(const Distribution& dist, double x)
{
  if (x < 0.0)
    return 0.0;
  return -std::expm1(std::visit([x](const auto& d) { return log_tail(d, x); }, dist));
}

double pdf(const Distribution& dist, double x)
{
  if (x < 0.0)
    return 0.0;
  return std::visit(
    overloaded{ [x](const BurrDist& d) {
                 if (x == 0.0)
                   return d.c == 1.0 ? d.ell : (d.c < 1.0 ? kInf : 0.0);
                 return d.ell * d.c * std::pow(x, d.c - 1.0) *
                        std::exp(-(d.ell + 1.0) * std::log1p(std::pow(x, d.c)));
               },
                [x](const WeibullDist& d) {
                  if (x == 0.0)
                    return d.kappa == 1.0 ? d.C : (d.kappa < 1.0 ? kInf : 0.0);
                  return d.C * d.kappa * std::pow(x, d.kappa - 1.0) *
                         std::exp(-d.C * std::pow(x, d.kappa));
                },
                [x](const GpdDist& d) {
                  if (x > d.upper())
                    return 0.0;
                  const double z = 1.0 + d.gamma * x / d.scale;
                  return std::exp(log_tail(d, x)) / (d.scale * z);
                } },
    dist);
}

double pdf_derivative(const Distribution& dist, double x)
{
  if (!(x > 0.0))
    throw DomainError("density derivative requires x > 0");
  const double f = pdf(dist, x);
  // f'/f from the log-density of each family.
  const double score = std::visit(
    overloaded{ [x](const BurrDist& d) {
                 const double xc = std::pow(x, d.c);
                 return (d.c - 1.0) / x - (d.ell + 1.0) * d.c * xc / (x * (1.0 + xc));
               },
                [x](const WeibullDist& d) {
                  return (d.kappa - 1.0) / x - d.C * d.kappa * std::pow(x, d.kappa - 1.0);
                },
                [x](const GpdDist& d) {
                  return -(1.0 + d.gamma) / (d.scale + d.gamma * x);
                } },
    dist);
  return f * score;
}

double quantile(const Distribution& dist, double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("quantile level must lie in (0, 1)");
  return std::visit(
    overloaded{ [p](const BurrDist& d) {
                 return std::pow(std::expm1(-std::log1p(-p) / d.ell), 1.0 / d.c);
               },
                [p](const WeibullDist& d) {
                  return std::pow(-std::log1p(-p) / d.C, 1.0 / d.kappa);
                },
                [p](const GpdDist& d) {
                  if (d.gamma == 0.0)
                    return -d.scale * std::log1p(-p);
                  return d.scale / d.gamma * std::expm1(-d.gamma * std::log1p(-p));
                } },
    dist);
}

std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed)
{
  if (n == 0)
    throw DomainError("sample size must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  std::visit(
    [&](const auto& d) {
      // Inverting the survival function keeps full relative precision in the upper tail.
      for (auto& v : out)
        v = inverse_tail(d, rng.uniform_open());
    },
    dist);
  return out;
}

double mef_by_quadrature(const Distribution& dist, double u)
{
  require_nonneg_x(u);
  const double scale = 1.0 + u;
  const double log_su = std::visit([u](const auto& d) { return log_tail(d, u); }, dist);
  if (!std::isfinite(log_su))
    throw DomainError("threshold lies outside the support");

  // The two-argument form passes the exact distance to the nearer endpoint,
  // which keeps the heavy-tail singularity at s = 1 resolvable.
  auto integrand = [&](double s, double sc) -> double {
    const double one_minus = s > 0.5 ? sc : 1.0 - s;
    if (!(one_minus > 0.0))
      return 0.0;
    const double t = scale * s / one_minus;
    const double lt = std::visit([&](const auto& d) { return log_tail(d, u + t); }, dist);
    // Log space: one_minus^2 underflows long before the product does.
    const double v = std::exp(lt - log_su + std::log(scale) - 2.0 * std::log(one_minus));
    return std::isfinite(v) ? v : 0.0;
  };

  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, 0.0, 1.0, 1e-10, &error, &l1);
  if (!std::isfinite(value))
    throw DomainError("mean excess integral did not converge");
  return value;
}

double true_mef(const Distribution& dist, double u)
{
  require_nonneg_x(u);
  return std::visit(
    overloaded{ [&](const BurrDist& d) {
                 if (d.c * d.ell <= 1.0)
                   throw DomainError("Burr mean excess is infinite when c * ell <= 1");
                 return mef_by_quadrature(dist, u);
               },
                [&](const WeibullDist& d) {
                  if (d.kappa == 1.0)
                    return 1.0 / d.C;
                  return mef_by_quadrature(dist, u);
                },
                [&](const GpdDist& d) {
                  if (d.gamma >= 1.0)
                    throw DomainError("GPD mean excess is infinite when gamma >= 1");
                  if (u >= d.upper())
                    throw DomainError("threshold lies outside the GPD support");
                  return (d.scale + d.gamma * u) / (1.0 - d.gamma);
                } },
    dist);
}

HallParams hall_params_of_burr(const BurrDist& dist)
{
  return HallParams(1.0, dist.c * dist.ell, -dist.ell, dist.c);
}

std::string describe(const Distribution& dist)
{
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{ [&](const BurrDist& d) { os << "burr:" << d.c << "," << d.ell; },
                         [&](const WeibullDist& d) { os << "weibull:" << d.kappa << "," << d.C; },
                         [&](const GpdDist& d) { os << "gpd:" << d.gamma << "," << d.scale; } },
             dist);
  return os.str();
}

} // namespace tailbench
