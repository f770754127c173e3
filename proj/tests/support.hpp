#pragma once

#include <cmath>
#include <random>

#include "dampstring/coefficients.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/types.hpp"

namespace dampstring::test {

inline DiscreteOperatorSet ops_for(int n, const BoundaryCondition& bc, double rho = 1.0,
                                   double alpha = 1.0) {
  return assemble(n, constant(rho, CoefficientKind::Density), constant(alpha, CoefficientKind::Damping),
                  bc);
}

inline CVec random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(d(gen), d(gen));
  return v;
}

// Matrix-level weighted adjoint residual sup |<Tf, g>_v - <f, T*g>_u|.
inline double adjoint_defect(const DiscreteOperatorSet& ops, std::uint64_t seed) {
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    CVec f = random_vector(ops.nu(), seed + 2 * k);
    CVec g = random_vector(ops.nv(), seed + 2 * k + 1);
    cplx a = inner_v(ops, ops.T * f, g);
    cplx b = inner_u(ops, f, ops.Tstar * g);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

inline const BoundaryCondition kAllBcs[] = {
    BoundaryCondition::max(),  BoundaryCondition::min(),
    BoundaryCondition::zero0(), BoundaryCondition::zero1(),
    BoundaryCondition::quasi(cplx(1.0, 0.0)), BoundaryCondition::quasi(cplx(0.0, 1.0)),
    BoundaryCondition::quasi(cplx(-1.0, 0.0)), BoundaryCondition::quasi(cplx(0.5, 0.3)),
};

} // namespace dampstring::test
