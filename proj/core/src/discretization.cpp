#include "dampstring/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dampstring/linalg.hpp"

namespace dampstring {

BoundaryCondition BoundaryCondition::quasi(cplx w) {
  if (w == cplx(0.0, 0.0)) throw std::invalid_argument("Quasi boundary condition requires omega != 0");
  return {Kind::Quasi, w};
}

std::string BoundaryCondition::name() const {
  switch (kind) {
    case Kind::Max: return "max";
    case Kind::Min: return "min";
    case Kind::Zero0: return "zero0";
    case Kind::Zero1: return "zero1";
    case Kind::Quasi: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "omega:%.17g,%.17g", omega.real(), omega.imag());
      return buf;
    }
  }
  return "?";
}

BoundaryCondition parse_boundary_condition(const std::string& text) {
  if (text == "min") return BoundaryCondition::min();
  if (text == "max") return BoundaryCondition::max();
  if (text == "zero0") return BoundaryCondition::zero0();
  if (text == "zero1") return BoundaryCondition::zero1();
  if (text.rfind("omega:", 0) == 0) {
    std::string rest = text.substr(6);
    auto comma = rest.find(',');
    try {
      std::size_t used = 0;
      double re = std::stod(rest.substr(0, comma), &used);
      if (used != (comma == std::string::npos ? rest.size() : comma)) throw std::invalid_argument("");
      double im = 0.0;
      if (comma != std::string::npos) {
        std::string tail = rest.substr(comma + 1);
        im = std::stod(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("");
      }
      return BoundaryCondition::quasi({re, im});
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("malformed boundary condition '" + text + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("malformed boundary condition '" + text + "'");
    }
  }
  throw std::invalid_argument("unknown boundary condition '" + text +
                              "' (expected min|max|zero0|zero1|omega:RE,IM)");
}

WeightedGrid build_grid(int n, const CoefficientSpec& rho, const BoundaryCondition& bc) {
  if (n < 4) throw std::invalid_argument("grid needs at least 4 cells");
  WeightedGrid g;
  g.n = n;
  g.h = 1.0 / n;
  g.bc = bc;
  int first = 0, last = n;
  switch (bc.kind) {
    case BoundaryCondition::Kind::Max: break;
    case BoundaryCondition::Kind::Min: first = 1; last = n - 1; break;
    case BoundaryCondition::Kind::Zero0: first = 1; break;
    case BoundaryCondition::Kind::Zero1: last = n - 1; break;
    case BoundaryCondition::Kind::Quasi: last = n - 1; break;
  }
  for (int k = first; k <= last; ++k) g.retained.push_back(k);
  int nu = static_cast<int>(g.retained.size());
  g.node_x.resize(nu);
  g.node_weights.resize(nu);
  for (int i = 0; i < nu; ++i) {
    int k = g.retained[i];
    double x = k * g.h;
    double r = sample(rho, x);
    g.node_x[i] = x;
    g.node_weights[i] = r * r * g.h;
    if (k == 0 || k == n) g.node_weights[i] *= 0.5;
  }
  if (bc.kind == BoundaryCondition::Kind::Quasi) {
    double r0 = sample(rho, 0.0), r1 = sample(rho, 1.0);
    g.node_weights[0] = 0.5 * g.h * (r0 * r0 + std::norm(bc.omega) * r1 * r1);
  }
  g.cell_x.resize(n);
  g.cell_weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double x = (j + 0.5) * g.h;
    double r = sample(rho, x);
    g.cell_x[j] = x;
    g.cell_weights[j] = r * r * g.h;
  }
  return g;
}

namespace {

// Column of full node k, or -1 if dropped; Quasi maps node n to column 0 with factor omega.
std::pair<int, cplx> node_column(const WeightedGrid& g, int k) {
  if (g.bc.kind == BoundaryCondition::Kind::Quasi && k == g.n) return {0, g.bc.omega};
  int first = g.retained.front();
  int idx = k - first;
  if (idx < 0 || idx >= static_cast<int>(g.retained.size())) return {-1, 0.0};
  return {idx, 1.0};
}

} // namespace

CMat assemble_T(const WeightedGrid& g, const CoefficientSpec& rho) {
  int nu = static_cast<int>(g.retained.size());
  CMat T = CMat::Zero(g.n, nu);
  for (int j = 0; j < g.n; ++j) {
    double s = 1.0 / (g.h * sample(rho, g.cell_x[j]));
    auto [cl, fl] = node_column(g, j);
    auto [cr, fr] = node_column(g, j + 1);
    if (cl >= 0) T(j, cl) += -I_unit * s * fl;
    if (cr >= 0) T(j, cr) += I_unit * s * fr;
  }
  return T;
}

CMat assemble_adjoint(const CMat& T, const RVec& wu, const RVec& wv) {
  if (T.rows() != wv.size() || T.cols() != wu.size())
    throw std::invalid_argument("assemble_adjoint: dimension mismatch");
  return wu.cwiseInverse().asDiagonal() * T.adjoint() * wv.asDiagonal();
}

CMat assemble_dirac(const CMat& T, const CMat& Tstar) {
  if (T.rows() != Tstar.cols() || T.cols() != Tstar.rows())
    throw std::invalid_argument("assemble_dirac: shape mismatch");
  const Eigen::Index nu = T.cols(), nv = T.rows();
  CMat D = CMat::Zero(nu + nv, nu + nv);
  D.topRightCorner(nu, nv) = Tstar;
  D.bottomLeftCorner(nv, nu) = T;
  return D;
}

RVec damping_diagonal(const WeightedGrid& g, const CoefficientSpec& rho,
                      const CoefficientSpec& alpha) {
  RVec C(g.node_x.size());
  for (Eigen::Index i = 0; i < C.size(); ++i) {
    double r = sample(rho, g.node_x[i]);
    C[i] = sample(alpha, g.node_x[i]) / (r * r);
  }
  if (g.bc.kind == BoundaryCondition::Kind::Quasi) {
    double w2 = std::norm(g.bc.omega);
    double r0 = sample(rho, 0.0), r1 = sample(rho, 1.0);
    C[0] = (sample(alpha, 0.0) + w2 * sample(alpha, 1.0)) / (r0 * r0 + w2 * r1 * r1);
  }
  return C;
}

CVec node_samples(const WeightedGrid& g, const CoefficientSpec& rho,
                  const std::function<cplx(double)>& f) {
  CVec out(g.node_x.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = f(g.node_x[i]);
  if (g.bc.kind == BoundaryCondition::Kind::Quasi) {
    double w2 = std::norm(g.bc.omega);
    double r0 = sample(rho, 0.0), r1 = sample(rho, 1.0);
    out[0] = (r0 * r0 * f(0.0) + std::conj(g.bc.omega) * r1 * r1 * f(1.0)) / (r0 * r0 + w2 * r1 * r1);
  }
  return out;
}

CMat assemble_damping(const RVec& C, int n_cells) {
  const Eigen::Index nu = C.size();
  CMat B = CMat::Zero(nu + n_cells, nu + n_cells);
  for (Eigen::Index i = 0; i < nu; ++i) B(i, i) = -I_unit * C[i];
  return B;
}

CMat assemble_generator(const CMat& TstarT, const RVec& C) {
  const Eigen::Index nu = TstarT.rows();
  CMat G = CMat::Zero(2 * nu, 2 * nu);
  G.topRightCorner(nu, nu).setIdentity();
  G.bottomLeftCorner(nu, nu) = -TstarT;
  for (Eigen::Index i = 0; i < nu; ++i) G(nu + i, nu + i) = -C[i];
  return G;
}

CMat DiscreteOperatorSet::DB() const {
  CMat A = D();
  for (int i = 0; i < nu(); ++i) A(i, i) += -I_unit * C[i];
  return A;
}

CMat DiscreteOperatorSet::M() const {
  return wv.cwiseSqrt().asDiagonal() * T * wu.cwiseSqrt().cwiseInverse().asDiagonal();
}

RVec DiscreteOperatorSet::frame_weights() const {
  RVec w(dim());
  w << wu, wv;
  return w;
}

CMat DiscreteOperatorSet::dirac_frame(bool with_damping) const {
  RVec s = frame_weights().cwiseSqrt();
  CMat A = with_damping ? DB() : D();
  return s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
}

DiscreteOperatorSet assemble(int n, const CoefficientSpec& rho, const CoefficientSpec& alpha,
                             const BoundaryCondition& bc) {
  DiscreteOperatorSet ops;
  ops.grid = build_grid(n, rho, bc);
  ops.bc = bc;
  ops.wu = ops.grid.node_weights;
  ops.wv = ops.grid.cell_weights;
  ops.T = assemble_T(ops.grid, rho);
  ops.Tstar = assemble_adjoint(ops.T, ops.wu, ops.wv);
  ops.C = damping_diagonal(ops.grid, rho, alpha);
  return ops;
}

cplx inner_u(const DiscreteOperatorSet& ops, const CVec& f, const CVec& g) {
  return f.dot(ops.wu.asDiagonal() * g);
}

cplx inner_v(const DiscreteOperatorSet& ops, const CVec& f, const CVec& g) {
  return f.dot(ops.wv.asDiagonal() * g);
}

double norm_frame(const RVec& weights, const CVec& x) {
  return std::sqrt((weights.array() * x.array().abs2()).sum());
}

TridiagonalForm dirac_tridiagonal(const DiscreteOperatorSet& ops) {
  if (!ops.bc.is_separated())
    throw std::invalid_argument("dirac_tridiagonal requires separated boundary conditions");
  const int nu = ops.nu(), nv = ops.nv();
  std::vector<int> order(nu + nv);
  std::iota(order.begin(), order.end(), 0);
  auto pos = [&](int i) { return i < nu ? ops.grid.node_x[i] : ops.grid.cell_x[i - nu]; };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pos(a) < pos(b); });
  TridiagonalForm tf;
  tf.order = order;
  tf.diag = CVec::Zero(nu + nv);
  tf.offdiag = RVec::Zero(nu + nv - 1);
  RVec su = ops.wu.cwiseSqrt(), sv = ops.wv.cwiseSqrt();
  for (int p = 0; p < nu + nv; ++p) {
    int a = order[p];
    if (a < nu) tf.diag[p] = -I_unit * ops.C[a];
    if (p + 1 < nu + nv) {
      int b = order[p + 1];
      int node = a < nu ? a : b, cell = a < nu ? b - nu : a - nu;
      if ((a < nu) == (b < nu)) throw std::logic_error("position order is not node/cell alternating");
      tf.offdiag[p] = std::abs(sv[cell] * ops.T(cell, node) / su[node]);
    }
  }
  return tf;
}

std::vector<int> band_ordering(const DiscreteOperatorSet& ops) {
  const int nu = ops.nu(), nv = ops.nv(), N = nu + nv;
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  auto pos = [&](int i) { return i < nu ? ops.grid.node_x[i] : ops.grid.cell_x[i - nu]; };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pos(a) < pos(b); });
  if (ops.bc.is_separated()) return order;
  std::vector<int> folded;
  folded.reserve(N);
  for (int lo = 0, hi = N - 1; lo <= hi; ++lo, --hi) {
    folded.push_back(order[lo]);
    if (hi != lo) folded.push_back(order[hi]);
  }
  return folded;
}

double sigma_max_dirac(const DiscreteOperatorSet& ops) {
  if (ops.bc.is_separated()) {
    TridiagonalForm tf = dirac_tridiagonal(ops);
    RVec ev = symmetric_tridiagonal_eigenvalues(RVec::Zero(tf.diag.size()), tf.offdiag);
    return ev.cwiseAbs().maxCoeff();
  }
  return singular_values(ops.M()).maxCoeff();
}

KernelDims kernel_dimensions(const DiscreteOperatorSet& ops) {
  RVec sv = singular_values(ops.M());
  KernelDims kd;
  double smax = sv.size() ? sv.maxCoeff() : 0.0;
  kd.tol_zero = 1e-10 * smax;
  int rank = 0;
  kd.nearest_ratio = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    double s = sv[i];
    if (s > kd.tol_zero) ++rank;
    if (s > 0.0) {
      double ratio = std::max(s / kd.tol_zero, kd.tol_zero / s);
      kd.nearest_ratio = std::min(kd.nearest_ratio, ratio);
      if (ratio < 10.0) kd.ambiguous = true;
    }
  }
  kd.ker_T = ops.nu() - rank;
  kd.ker_Tstar = ops.nv() - rank;
  kd.ker_D = kd.ker_T + kd.ker_Tstar;
  return kd;
}

} // namespace dampstring
