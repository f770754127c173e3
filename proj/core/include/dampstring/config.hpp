#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dampstring/coefficients.hpp"
#include "dampstring/discretization.hpp"

namespace dampstring {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  int n_grid = 64;
  std::string bc = "min";
  std::string rho = "const 1";
  std::string alpha = "const 1";
  std::optional<std::string> speed;  // when set, rho and alpha are divided by speed^2
  double zeta = 0.1;
  int n_max = 2;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double fit_lo = 1.0 / 32.0;
  double fit_hi = 1.0 / 16.0;
  double cluster_fraction = 0.5;
  std::string out_dir = "out";
  bool quick = false;  // verify-all: skip the large-grid asymptotic runs
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);
// Semantic checks; throws ConfigError naming the field.
void validate_config(const RunConfig& cfg);

struct ResolvedProblem {
  BoundaryCondition bc;
  CoefficientSpec rho;
  CoefficientSpec alpha;
};

// Parses the coefficient texts and applies the variable-speed reduction.
ResolvedProblem resolve_problem(const RunConfig& cfg);

} // namespace dampstring
