#pragma once

#include <cstdint>
#include <utility>

#include "dampstring/coefficients.hpp"

namespace dampstring {

struct RandomCoefficientOptions {
  double rho_lo = 0.5, rho_hi = 2.0;
  double alpha_lo = -1.0, alpha_hi = 1.0;
  int max_degree = 3;
  int max_pieces = 3;
};

// Piecewise polynomial with Bernstein coefficients drawn uniformly in [lo, hi],
// so every value stays in [lo, hi].
CoefficientSpec random_piecewise(std::uint64_t seed, double lo, double hi, int max_degree,
                                 int max_pieces, CoefficientKind kind);

// (rho, alpha) drawn from one seed.
std::pair<CoefficientSpec, CoefficientSpec> random_coefficients(
    std::uint64_t seed, const RandomCoefficientOptions& opt = {});

// Monomial coefficients in the global x of sum_k b_k B_{k,d}((x - a) / (b - a)).
std::vector<double> bernstein_to_monomial(const std::vector<double>& b, double a, double bb);

} // namespace dampstring
