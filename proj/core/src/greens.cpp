#include "dampstring/greens.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dampstring {

namespace {

void require_invertible(const BoundaryCondition& bc) {
  if (bc.kind == BoundaryCondition::Kind::Max)
    throw std::invalid_argument("T*T has a kernel for the maximal operator; no Green's function");
  if (bc.kind == BoundaryCondition::Kind::Quasi && bc.omega == cplx(1.0, 0.0))
    throw std::invalid_argument("T*T has a kernel for omega = 1; no Green's function");
}

} // namespace

QuasiConstants quasi_constants(cplx w) {
  double d = std::norm(1.0 - w);
  double w2 = std::norm(w);
  cplx cp = (1.0 + w - std::conj(w) - w2) / (2.0 * d);
  cplx cm = (1.0 - w + std::conj(w) - w2) / (2.0 * d);
  return {cp, cm, 1.0 / d};
}

cplx greens_kernel(const BoundaryCondition& bc, double x, double xp) {
  require_invertible(bc);
  if (x < 0.0 || x > 1.0 || xp < 0.0 || xp > 1.0)
    throw std::invalid_argument("greens_kernel: arguments outside [0,1]");
  switch (bc.kind) {
    case BoundaryCondition::Kind::Min: return std::min(x, xp) * (1.0 - std::max(x, xp));
    case BoundaryCondition::Kind::Zero0: return std::min(x, xp);
    case BoundaryCondition::Kind::Zero1: return 1.0 - std::max(x, xp);
    case BoundaryCondition::Kind::Quasi: {
      QuasiConstants q = quasi_constants(bc.omega);
      return -0.5 * std::abs(x - xp) - q.c_minus * x - q.c_plus * xp + q.offset;
    }
    default: break;
  }
  throw std::logic_error("unreachable");
}

double t0_analytic(const BoundaryCondition& bc, const CoefficientSpec& alpha) {
  require_invertible(bc);
  CoefficientSpec w;
  switch (bc.kind) {
    case BoundaryCondition::Kind::Min: w = polynomial({0.0, 1.0, -1.0}); break;
    case BoundaryCondition::Kind::Zero0: w = polynomial({0.0, 1.0}); break;
    case BoundaryCondition::Kind::Zero1: w = polynomial({1.0, -1.0}); break;
    case BoundaryCondition::Kind::Quasi: {
      double d = std::norm(1.0 - bc.omega);
      double w2 = std::norm(bc.omega);
      // G(x, x) = [1 + (|omega|^2 - 1) x] / |1 - omega|^2
      w = polynomial({1.0 / d, (w2 - 1.0) / d});
      break;
    }
    default: throw std::logic_error("unreachable");
  }
  return integrate_product({w, alpha}, 0.0, 1.0);
}

CVec apply_inverse_via_kernel(const BoundaryCondition& bc, const CVec& f_cells,
                              const WeightedGrid& grid) {
  if (f_cells.size() != grid.cell_x.size())
    throw std::invalid_argument("apply_inverse_via_kernel: f must be sampled at cell midpoints");
  CVec u = CVec::Zero(grid.node_x.size());
  for (Eigen::Index k = 0; k < u.size(); ++k)
    for (Eigen::Index j = 0; j < f_cells.size(); ++j)
      u[k] += greens_kernel(bc, grid.node_x[k], grid.cell_x[j]) * f_cells[j] * grid.cell_weights[j];
  return u;
}

} // namespace dampstring
