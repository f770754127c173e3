#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dampstring/coefficients.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

struct BoundaryCondition {
  enum class Kind { Max, Min, Zero0, Zero1, Quasi };
  Kind kind = Kind::Min;
  cplx omega{1.0, 0.0};

  static BoundaryCondition max() { return {Kind::Max, {1.0, 0.0}}; }
  static BoundaryCondition min() { return {Kind::Min, {1.0, 0.0}}; }
  static BoundaryCondition zero0() { return {Kind::Zero0, {1.0, 0.0}}; }
  static BoundaryCondition zero1() { return {Kind::Zero1, {1.0, 0.0}}; }
  static BoundaryCondition quasi(cplx w);

  // True when the assembled operators are i times a real matrix.
  bool is_real() const { return kind != Kind::Quasi || omega.imag() == 0.0; }
  // Separated conditions give a tridiagonal Dirac operator in position order.
  bool is_separated() const { return kind != Kind::Quasi; }
  BoundaryCondition conjugate() const { return {kind, std::conj(omega)}; }
  std::string name() const;
};

// Accepts min | max | zero0 | zero1 | omega:RE,IM
BoundaryCondition parse_boundary_condition(const std::string& text);

struct WeightedGrid {
  int n = 0;
  double h = 0.0;
  BoundaryCondition bc;
  std::vector<int> retained;  // node indices k (x_k = k h) carrying a degree of freedom
  RVec node_x;                // positions of retained nodes
  RVec cell_x;                // cell midpoints
  RVec node_weights;
  RVec cell_weights;
};

WeightedGrid build_grid(int n, const CoefficientSpec& rho, const BoundaryCondition& bc);

CMat assemble_T(const WeightedGrid& grid, const CoefficientSpec& rho);
CMat assemble_adjoint(const CMat& T, const RVec& wu, const RVec& wv);
CMat assemble_dirac(const CMat& T, const CMat& Tstar);
// Node diagonal of alpha / rho^2; for Quasi the identified node averages both endpoints.
RVec damping_diagonal(const WeightedGrid& grid, const CoefficientSpec& rho,
                      const CoefficientSpec& alpha);
// Node vector of a function. For Quasi the identified node carries the
// rho^2-weighted average of f(0) and conj(omega) f(1), the projection that
// matches its test function.
CVec node_samples(const WeightedGrid& grid, const CoefficientSpec& rho,
                  const std::function<cplx(double)>& f);
CMat assemble_damping(const RVec& C, int n_cells);
CMat assemble_generator(const CMat& TstarT, const RVec& C);

struct DiscreteOperatorSet {
  WeightedGrid grid;
  BoundaryCondition bc;
  CMat T;       // cells x retained nodes
  CMat Tstar;   // retained nodes x cells
  RVec wu, wv;  // node and cell weights
  RVec C;       // alpha / rho^2 at retained nodes

  int nu() const { return static_cast<int>(wu.size()); }
  int nv() const { return static_cast<int>(wv.size()); }
  int dim() const { return nu() + nv(); }

  CMat D() const { return assemble_dirac(T, Tstar); }
  CMat B() const { return assemble_damping(C, nv()); }
  CMat DB() const;
  CMat G() const { return assemble_generator(TstarT(), C); }
  CMat TstarT() const { return Tstar * T; }
  CMat TTstar() const { return T * Tstar; }

  // Weighted frame: M = Wv^{1/2} T Wu^{-1/2}; similarity-transformed D + B.
  CMat M() const;
  CMat dirac_frame(bool with_damping = true) const;
  // Frame weights diag(Wu, Wv) as a single vector.
  RVec frame_weights() const;

  double sup_damping() const { return C.size() ? C.cwiseAbs().maxCoeff() : 0.0; }
};

DiscreteOperatorSet assemble(int n, const CoefficientSpec& rho, const CoefficientSpec& alpha,
                             const BoundaryCondition& bc);

// Weighted inner products.
cplx inner_u(const DiscreteOperatorSet& ops, const CVec& f, const CVec& g);
cplx inner_v(const DiscreteOperatorSet& ops, const CVec& f, const CVec& g);
double norm_frame(const RVec& weights, const CVec& x);

// Largest singular value of D (equals that of M).
double sigma_max_dirac(const DiscreteOperatorSet& ops);

struct KernelDims {
  int ker_T = 0;
  int ker_Tstar = 0;
  int ker_D = 0;
  double tol_zero = 0.0;
  bool ambiguous = false;
  double nearest_ratio = 0.0;  // closest singular value to tol_zero, as a ratio >= 1
};

KernelDims kernel_dimensions(const DiscreteOperatorSet& ops);

// Position-ordered tridiagonal form of the frame Dirac operator for separated
// conditions: diagonal (-i C at nodes, 0 at cells) and real off-diagonal.
struct TridiagonalForm {
  CVec diag;
  RVec offdiag;
  std::vector<int> order;  // frame index at each position
};

TridiagonalForm dirac_tridiagonal(const DiscreteOperatorSet& ops);

// Frame index permutation that gives a narrow band: position order for
// separated conditions and a folded position order for Quasi.
std::vector<int> band_ordering(const DiscreteOperatorSet& ops);

} // namespace dampstring
