#pragma once

#include "dampstring/coefficients.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

// Kernel G(x, x') of (T*T)^{-1} at z = 0 with respect to rho^2 dx, so that
// ((T*T)^{-1} f)(x) = \int G(x, x') f(x') rho(x')^2 dx'. Independent of rho.
// Rejects Max and Quasi(1), where T*T has a kernel.
cplx greens_kernel(const BoundaryCondition& bc, double x, double xp);

// Linear coefficients of the Quasi kernel:
// G(x, x') = -|x - x'|/2 - c_minus x - c_plus x' + 1/|1 - omega|^2.
struct QuasiConstants {
  cplx c_plus, c_minus;
  double offset;
};
QuasiConstants quasi_constants(cplx omega);

// \int_0^1 G(x, x) alpha(x) dx by exact polynomial integration.
double t0_analytic(const BoundaryCondition& bc, const CoefficientSpec& alpha);

// Cell-midpoint quadrature of the kernel against f sampled at cell midpoints,
// evaluated at the retained nodes of the grid.
CVec apply_inverse_via_kernel(const BoundaryCondition& bc, const CVec& f_cells,
                              const WeightedGrid& grid);

} // namespace dampstring
