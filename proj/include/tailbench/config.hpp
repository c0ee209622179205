#pragma once

#include "tailbench/simulation.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace tailbench {

// Flat key = value configuration for a single simulation cell. One entry per
// line, '#' starts a comment, blank lines are ignored. Keys:
//   study        tail | mean_excess
//   dist         burr:c,l | weibull:kappa,C | gpd:gamma,scale
//   n            sample size
//   replications default 1000 (tail) or 10000 (mean_excess)
//   base_seed    default 1
//   target       hall:C1 | weibull:C2 | quantile:p | fixed:x
//   C3           threshold fraction u = C3 x; default 0.5 (Burr, GPD) or 0.99 (Weibull)
//   estimators   comma list of PI, PT, AL, PB; default all that apply
//   weibull_log  ln_n | ln_log2_n
//   r            order statistics for the Hill-type fit; default round(n^(2/3))
// Numbers accept fractions such as 1/3. Throws ConfigError on any problem.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

// "burr:c,l", "weibull:kappa,C" or "gpd:gamma,scale".
Distribution parse_distribution(std::string_view text);

// Decimal or a/b fraction; throws ConfigError.
double parse_number(std::string_view text);

} // namespace tailbench
