#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rsl::cli {
namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return v.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": '" + key + "' must be a number");
  }
}

template <class T>
T count(const YAML::Node& v, const char* key) {
  try {
    const auto x = v.as<long long>();
    if (x < 1) throw ConfigError(std::string(key) + " must be >= 1");
    return static_cast<T>(x);
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string(key) + " must be a positive integer");
  }
}

DistributionSpec law_from(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + ": a law must be a map with a 'family' key");
  if (!node["family"]) throw ConfigError(where + ": missing 'family'");
  const auto family = node["family"].as<std::string>();
  if (family == "exponential") {
    check_keys(node, {"family", "rate"}, where);
    return DistributionSpec::exponential(number(node, "rate", where));
  }
  if (family == "deterministic") {
    check_keys(node, {"family", "value"}, where);
    return DistributionSpec::deterministic(number(node, "value", where));
  }
  if (family == "pareto") {
    check_keys(node, {"family", "shape", "scale"}, where);
    return DistributionSpec::pareto(number(node, "shape", where), number(node, "scale", where));
  }
  if (family == "gamma") {
    check_keys(node, {"family", "shape", "rate"}, where);
    return DistributionSpec::gamma(number(node, "shape", where), number(node, "rate", where));
  }
  if (family == "tilted_pareto") {
    check_keys(node, {"family", "gamma", "beta", "scale"}, where);
    return DistributionSpec::tilted_pareto(number(node, "gamma", where), number(node, "beta", where),
                                           number(node, "scale", where));
  }
  if (family == "uniform") {
    check_keys(node, {"family", "lo", "hi"}, where);
    return DistributionSpec::uniform(number(node, "lo", where), number(node, "hi", where));
  }
  if (family == "difference") {
    check_keys(node, {"family", "B", "A"}, where);
    if (!node["B"] || !node["A"]) throw ConfigError(where + ": difference needs both 'B' and 'A'");
    return DistributionSpec::difference(law_from(node["B"], where + ".B"), law_from(node["A"], where + ".A"));
  }
  throw ConfigError(where + ": unknown family '" + family + "'");
}

SamplingPolicy policy_from(const YAML::Node& node) {
  if (!node.IsMap() || !node["kind"]) throw ConfigError("policy: expected a map with a 'kind' key");
  const auto kind = node["kind"].as<std::string>();
  if (kind == "regenerative") {
    check_keys(node, {"kind", "min_cycles", "spacing"}, "policy");
    Regenerative r;
    if (node["min_cycles"]) r.min_cycles = count<std::size_t>(node["min_cycles"], "policy.min_cycles");
    if (node["spacing"]) r.spacing = count<std::size_t>(node["spacing"], "policy.spacing");
    return r;
  }
  if (kind == "burn_in_thin") {
    check_keys(node, {"kind", "burn_in", "thin"}, "policy");
    BurnInThin b;
    if (node["burn_in"]) b.burn_in = count<std::size_t>(node["burn_in"], "policy.burn_in");
    if (node["thin"]) b.thin = count<std::size_t>(node["thin"], "policy.thin");
    return b;
  }
  throw ConfigError("policy: unknown kind '" + kind + "'");
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError("grid: values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("grid: values must be strictly increasing");
  }
}

void check(const ExperimentConfig& c) {
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  if (c.n < 1 || c.walk_n < 1) throw ConfigError("n and walk_n must be >= 1");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  check_grid(c.grid);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: expected a map at the top level");
  check_keys(root, {"p", "x_law", "seed", "n", "walk_n", "workers", "policy", "grid", "out"}, "config");

  ExperimentConfig c;
  try {
    if (root["p"]) c.p = number(root, "p", "config");
    if (root["x_law"]) c.x_law = law_from(root["x_law"], "x_law");
    if (root["seed"]) c.seed = root["seed"].as<std::uint64_t>();
    if (root["n"]) c.n = count<std::size_t>(root["n"], "n");
    if (root["walk_n"]) c.walk_n = count<std::size_t>(root["walk_n"], "walk_n");
    if (root["workers"]) c.workers = count<unsigned>(root["workers"], "workers");
    if (root["policy"]) c.policy = policy_from(root["policy"]);
    if (root["grid"]) {
      const YAML::Node g = root["grid"];
      if (g.IsScalar() && g.as<std::string>() == "quantiles") {
        c.grid.clear();
      } else if (g.IsSequence()) {
        for (const auto& v : g) c.grid.push_back(v.as<double>());
      } else {
        throw ConfigError("grid: expected 'quantiles' or a list of numbers");
      }
    }
    if (root["out"]) c.out = root["out"].as<std::string>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DistributionSpec parse_law(const std::string& text) {
  try {
    return law_from(YAML::Load(text), "law");
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("grid: cannot parse '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("grid: cannot parse '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("grid: empty list");
  check_grid(grid);
  return grid;
}

void apply(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.n) config.n = *o.n;
  if (o.workers) config.workers = *o.workers;
  if (o.out) config.out = *o.out;
  if (o.grid) config.grid = parse_grid(*o.grid);
  check(config);
}

std::string canonical(const ExperimentConfig& c) {
  std::string s = "p=" + fmt(c.p) + ";law=" + (c.x_law ? describe(*c.x_law) : "none") +
                  ";seed=" + std::to_string(c.seed) + ";n=" + std::to_string(c.n) +
                  ";walk_n=" + std::to_string(c.walk_n) + ";policy=" + describe(c.policy) + ";grid=";
  for (std::size_t i = 0; i < c.grid.size(); ++i) s += (i ? "," : "") + fmt(c.grid[i]);
  return s;
}

}  // namespace rsl::cli
