#include "tailbench/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tailbench {

namespace {

double sanitize(double v)
{
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

} // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options)
{
  const std::size_t dim = start.size();
  if (dim == 0)
    throw std::invalid_argument("nelder_mead needs at least one parameter");

  std::vector<std::vector<double>> vertex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i)
    vertex[i + 1][i] += options.initial_step;
  std::vector<double> value(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i)
    value[i] = sanitize(objective(vertex[i]));

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t i = 0; i < dim; ++i)
      out[i] = centroid[i] + t * (worst[i] - centroid[i]);
  };

  std::size_t iter = 0;
  bool converged = false;
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    double spread = 0.0;
    for (std::size_t v = 0; v <= dim; ++v)
      for (std::size_t i = 0; i < dim; ++i)
        spread = std::max(spread, std::abs(vertex[v][i] - vertex[best][i]));
    if (spread <= options.tolerance && std::isfinite(value[best])) {
      converged = true;
      break;
    }
    if (iter >= options.max_iterations)
      break;
    ++iter;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst)
        continue;
      for (std::size_t i = 0; i < dim; ++i)
        centroid[i] += vertex[v][i];
    }
    for (double& c : centroid)
      c /= static_cast<double>(dim);

    along(-1.0, trial, vertex[worst]);
    const double f_reflect = sanitize(objective(trial));
    if (f_reflect < value[best]) {
      along(-2.0, trial2, vertex[worst]);
      const double f_expand = sanitize(objective(trial2));
      if (f_expand < f_reflect) {
        vertex[worst] = trial2;
        value[worst] = f_expand;
      } else {
        vertex[worst] = trial;
        value[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < value[second]) {
      vertex[worst] = trial;
      value[worst] = f_reflect;
      continue;
    }
    // Outside contraction when the reflection improved on the worst, inside otherwise.
    const bool outside = f_reflect < value[worst];
    along(outside ? -0.5 : 0.5, trial2, vertex[worst]);
    const double f_contract = sanitize(objective(trial2));
    if (f_contract < (outside ? f_reflect : value[worst])) {
      vertex[worst] = trial2;
      value[worst] = f_contract;
      continue;
    }
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == best)
        continue;
      for (std::size_t i = 0; i < dim; ++i)
        vertex[v][i] = vertex[best][i] + 0.5 * (vertex[v][i] - vertex[best][i]);
      value[v] = sanitize(objective(vertex[v]));
    }
  }

  const auto best_it = std::min_element(value.begin(), value.end());
  const auto best_idx = static_cast<std::size_t>(best_it - value.begin());
  return { vertex[best_idx], *best_it, iter, converged };
}

} // namespace tailbench
