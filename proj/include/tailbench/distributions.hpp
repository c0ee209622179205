#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tailbench {

//! Burr type XII law with survival function (1 + x^c)^(-ell) on x >= 0.
struct BurrDist
{
  double c;
  double ell;

  BurrDist(double c, double ell);
};

//! Weibull law with survival function exp(-C x^kappa) on x >= 0.
struct WeibullDist
{
  double C;
  double kappa;

  WeibullDist(double C, double kappa);
};

//! Generalized Pareto law H_{gamma, scale}.
struct GpdDist
{
  double gamma;
  double scale;

  GpdDist(double gamma, double scale);

  //! Right end of the support (infinity when gamma >= 0).
  double upper() const;
};

using Distribution = std::variant<BurrDist, WeibullDist, GpdDist>;

//! Second-order Pareto tail: 1 - F(x) = A x^-alpha (1 + B x^-beta + o(x^-beta)).
struct HallParams
{
  double A;
  double alpha;
  double B;
  double beta;

  HallParams(double A, double alpha, double B, double beta);

  double gamma_of() const { return 1.0 / alpha; }
};

//! Light tail: 1 - F(x) = exp(-C x^kappa) + o(exp(-C x^kappa)).
struct WeibullTailParams
{
  double C;
  double kappa;

  WeibullTailParams(double C, double kappa);

  double gamma_of() const { return 0.0; }
};

// Exact survival function 1 - F(x).
double tail_prob(const Distribution& dist, double x);
double cdf(const Distribution& dist, double x);
double pdf(const Distribution& dist, double x);
// Derivative of the density, needed by the bias term of kernel MSE predictions.
double pdf_derivative(const Distribution& dist, double x);

// F^{-1}(p) in closed form, 0 < p < 1.
double quantile(const Distribution& dist, double p);

// n i.i.d. draws by inverse transform; identical seeds give identical samples.
std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

// Mean excess e(u) = E[X - u | X > u]. Uses closed forms where they exist and
// falls back to mef_by_quadrature otherwise.
double true_mef(const Distribution& dist, double u);

// e(u) = int_0^inf S(u + t) dt / S(u) by tanh-sinh quadrature after mapping
// t = (1 + u) s / (1 - s), relative tolerance 1e-10.
double mef_by_quadrature(const Distribution& dist, double u);

// Hall-class expansion of the Burr survival function: alpha = c ell,
// beta = c, A = 1, B = -ell.
HallParams hall_params_of_burr(const BurrDist& dist);

std::string describe(const Distribution& dist);

} // namespace tailbench
