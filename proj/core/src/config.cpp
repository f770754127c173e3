#include "dampstring/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dampstring {

namespace {

using json = nlohmann::json;

template <class T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

} // namespace

RunConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  static const std::set<std::string> known{
      "n_grid", "bc", "rho", "alpha", "speed", "zeta", "n_max", "seeds",
      "fit_window", "cluster_fraction", "out_dir", "quick"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(it.key(), "unknown key");

  RunConfig c;
  if (j.contains("n_grid")) c.n_grid = get_field<int>(j, "n_grid");
  if (j.contains("bc")) c.bc = get_field<std::string>(j, "bc");
  if (j.contains("rho")) c.rho = get_field<std::string>(j, "rho");
  if (j.contains("alpha")) c.alpha = get_field<std::string>(j, "alpha");
  if (j.contains("speed") && !j["speed"].is_null()) c.speed = get_field<std::string>(j, "speed");
  if (j.contains("zeta")) c.zeta = get_field<double>(j, "zeta");
  if (j.contains("n_max")) c.n_max = get_field<int>(j, "n_max");
  if (j.contains("seeds")) c.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds");
  if (j.contains("fit_window")) {
    auto w = get_field<std::vector<double>>(j, "fit_window");
    if (w.size() != 2) throw ConfigError("fit_window", "expected [lo, hi]");
    c.fit_lo = w[0];
    c.fit_hi = w[1];
  }
  if (j.contains("cluster_fraction")) c.cluster_fraction = get_field<double>(j, "cluster_fraction");
  if (j.contains("out_dir")) c.out_dir = get_field<std::string>(j, "out_dir");
  if (j.contains("quick")) c.quick = get_field<bool>(j, "quick");
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["n_grid"] = c.n_grid;
  j["bc"] = c.bc;
  j["rho"] = c.rho;
  j["alpha"] = c.alpha;
  j["speed"] = c.speed ? json(*c.speed) : json(nullptr);
  j["zeta"] = c.zeta;
  j["n_max"] = c.n_max;
  j["seeds"] = c.seeds;
  j["fit_window"] = {c.fit_lo, c.fit_hi};
  j["cluster_fraction"] = c.cluster_fraction;
  j["out_dir"] = c.out_dir;
  j["quick"] = c.quick;
  return j.dump(2);
}

void validate_config(const RunConfig& c) {
  if (c.n_grid < 8) throw ConfigError("n_grid", "must be >= 8");
  try {
    parse_boundary_condition(c.bc);
  } catch (const std::exception& e) {
    throw ConfigError("bc", e.what());
  }
  if (c.n_max < 0 || c.n_max > 8) throw ConfigError("n_max", "must be in [0, 8]");
  if (!(c.fit_lo > 0.0 && c.fit_lo < c.fit_hi && c.fit_hi <= 1.0))
    throw ConfigError("fit_window", "need 0 < lo < hi <= 1");
  if (!(c.cluster_fraction > 0.0 && c.cluster_fraction < 1.0))
    throw ConfigError("cluster_fraction", "must be in (0, 1)");
  if (c.seeds.empty()) throw ConfigError("seeds", "must not be empty");
  if (c.out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
  resolve_problem(c);
}

ResolvedProblem resolve_problem(const RunConfig& c) {
  ResolvedProblem p;
  try {
    p.bc = parse_boundary_condition(c.bc);
  } catch (const std::exception& e) {
    throw ConfigError("bc", e.what());
  }
  try {
    p.rho = parse_coefficient_spec(c.rho, CoefficientKind::Density);
  } catch (const std::exception& e) {
    throw ConfigError("rho", e.what());
  }
  try {
    p.alpha = parse_coefficient_spec(c.alpha, CoefficientKind::Damping);
  } catch (const std::exception& e) {
    throw ConfigError("alpha", e.what());
  }
  if (c.speed) {
    try {
      CoefficientSpec speed = parse_coefficient_spec(*c.speed, CoefficientKind::Density);
      auto reduced = reduce_variable_speed(p.rho, p.alpha, speed);
      p.rho = reduced.first;
      p.alpha = reduced.second;
    } catch (const std::exception& e) {
      throw ConfigError("speed", e.what());
    }
  }
  return p;
}

} // namespace dampstring
