#include "tailbench/config.hpp"

#include "tailbench/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tailbench {

namespace {

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

double parse_decimal(const std::string& s)
{
  if (s.empty())
    throw ConfigError("empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& key)
{
  const double v = parse_number(s);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw ConfigError(key + " must be a nonnegative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

} // namespace

double parse_number(std::string_view text)
{
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos)
    return parse_decimal(s);
  const double num = parse_decimal(trim(s.substr(0, slash)));
  const double den = parse_decimal(trim(s.substr(slash + 1)));
  if (den == 0.0)
    throw ConfigError("zero denominator in '" + s + "'");
  return num / den;
}

Distribution parse_distribution(std::string_view text)
{
  const std::string s = trim(text);
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw ConfigError("distribution must look like family:a,b, got '" + s + "'");
  const std::string family = lower(trim(s.substr(0, colon)));
  const auto args = split(std::string_view(s).substr(colon + 1), ',');
  if (args.size() != 2)
    throw ConfigError("distribution '" + s + "' needs exactly two parameters");
  const double a = parse_number(args[0]);
  const double b = parse_number(args[1]);
  try {
    if (family == "burr")
      return BurrDist(a, b);
    if (family == "weibull")
      return WeibullDist(b, a);
    if (family == "gpd")
      return GpdDist(a, b);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid distribution parameters: ") + e.what());
  }
  throw ConfigError("unknown distribution family '" + family + "'");
}

SimConfig parse_config(std::string_view text)
{
  std::map<std::string, std::string> kv;
  std::istringstream in{ std::string(text) };
  std::string line;
  int lineno = 0;
  static const std::set<std::string> known{ "study", "dist", "n", "replications", "base_seed", "target",
                                            "c3", "estimators", "weibull_log", "r" };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string t = trim(line);
    if (t.empty())
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(t.substr(0, eq)));
    const std::string value = trim(t.substr(eq + 1));
    if (!known.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!kv.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  if (!kv.count("dist"))
    throw ConfigError("missing required key 'dist'");

  SimConfig c;
  c.dist = parse_distribution(kv["dist"]);
  const bool weibull = std::holds_alternative<WeibullDist>(c.dist);
  const bool burr = std::holds_alternative<BurrDist>(c.dist);

  if (auto it = kv.find("study"); it != kv.end()) {
    const std::string s = lower(it->second);
    if (s == "tail")
      c.study = Study::Tail;
    else if (s == "mean_excess" || s == "mef")
      c.study = Study::MeanExcess;
    else
      throw ConfigError("study must be tail or mean_excess");
  }
  if (auto it = kv.find("n"); it != kv.end())
    c.n = parse_count(it->second, "n");
  c.replications = c.study == Study::Tail ? kTailReplications : kMeanExcessReplications;
  if (auto it = kv.find("replications"); it != kv.end())
    c.replications = parse_count(it->second, "replications");
  if (auto it = kv.find("base_seed"); it != kv.end())
    c.base_seed = parse_count(it->second, "base_seed");
  c.C3 = weibull ? kWeibullC3 : kBurrC3;
  if (auto it = kv.find("c3"); it != kv.end())
    c.C3 = parse_number(it->second);
  if (auto it = kv.find("r"); it != kv.end())
    c.r = parse_count(it->second, "r");

  if (burr)
    c.target = { TargetRule::HallPower, 1.0 };
  else if (weibull)
    c.target = { TargetRule::WeibullLog, 0.2 };
  else
    c.target = { TargetRule::Quantile, 0.99 };
  if (auto it = kv.find("target"); it != kv.end()) {
    const auto colon = it->second.find(':');
    if (colon == std::string::npos)
      throw ConfigError("target must look like rule:value");
    const std::string rule = lower(trim(it->second.substr(0, colon)));
    c.target.constant = parse_number(it->second.substr(colon + 1));
    if (rule == "hall")
      c.target.rule = TargetRule::HallPower;
    else if (rule == "weibull")
      c.target.rule = TargetRule::WeibullLog;
    else if (rule == "quantile")
      c.target.rule = TargetRule::Quantile;
    else if (rule == "fixed")
      c.target.rule = TargetRule::Fixed;
    else
      throw ConfigError("unknown target rule '" + rule + "'");
  }
  if (auto it = kv.find("weibull_log"); it != kv.end()) {
    const std::string s = lower(it->second);
    if (s == "ln_n")
      c.target.log_base = WeibullLogBase::LnN;
    else if (s == "ln_log2_n")
      c.target.log_base = WeibullLogBase::LnLog2N;
    else
      throw ConfigError("weibull_log must be ln_n or ln_log2_n");
  }

  if (auto it = kv.find("estimators"); it != kv.end()) {
    c.estimators.clear();
    for (const auto& name : split(it->second, ',')) {
      std::string upper = name;
      std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      const auto tag = parse_estimator(upper);
      if (!tag)
        throw ConfigError("unknown estimator '" + name + "'");
      c.estimators.push_back(*tag);
    }
  } else if (c.study == Study::Tail && weibull) {
    c.estimators = { EstimatorTag::PT, EstimatorTag::AL, EstimatorTag::PB };
  }
  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path)
{
  std::ifstream f(path);
  if (!f)
    throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

} // namespace tailbench
