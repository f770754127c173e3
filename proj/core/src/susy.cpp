#include "dampstring/susy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dampstring/assignment.hpp"
#include "dampstring/linalg.hpp"
#include "dampstring/spectral.hpp"

namespace dampstring {

namespace {

struct HermEig {
  RVec values;  // ascending
  CMat vectors;
};

HermEig herm_eig(const CMat& H) {
  CMat S = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(S);
  return {es.eigenvalues(), es.eigenvectors()};
}

CMat apply_fn(const HermEig& e, const std::function<double(double)>& f) {
  RVec fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMat inverse(const CMat& A) { return Eigen::PartialPivLU<CMat>(A).inverse(); }

int numerical_rank(const CMat& M, double* tol_out = nullptr) {
  RVec sv = singular_values(M);
  double tol = sv.size() ? 1e-10 * sv.maxCoeff() : 0.0;
  if (tol_out) *tol_out = tol;
  return static_cast<int>((sv.array() > tol).count());
}

CMat frame_H1(const DiscreteOperatorSet& ops) {
  RVec su = ops.wu.cwiseSqrt();
  return su.asDiagonal() * ops.TstarT() * su.cwiseInverse().asDiagonal();
}

CMat frame_H2(const DiscreteOperatorSet& ops) {
  RVec sv = ops.wv.cwiseSqrt();
  return sv.asDiagonal() * ops.TTstar() * sv.cwiseInverse().asDiagonal();
}

double min_distance(const RVec& values, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < values.size(); ++i) d = std::min(d, std::abs(values[i] - z));
  return d;
}

} // namespace

PolarParts polar_decompose(const CMat& T, const RVec& wu, const RVec& wv) {
  RVec su = wu.cwiseSqrt(), sv = wv.cwiseSqrt();
  CMat M = sv.asDiagonal() * T * su.cwiseInverse().asDiagonal();
  PolarParts p;
  p.rank = numerical_rank(M, &p.tol_zero);

  // Kernel directions are the smallest eigenvalues of M*M and MM*; the rank
  // comes from the singular values since squaring loses the small ones.
  HermEig e1 = herm_eig(M.adjoint() * M);
  HermEig e2 = herm_eig(M * M.adjoint());
  const Eigen::Index n1 = e1.values.size(), n2 = e2.values.size();
  RVec s1(n1), inv1(n1), s2(n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    bool zero = i < n1 - p.rank;
    s1[i] = zero ? 0.0 : std::sqrt(std::max(e1.values[i], 0.0));
    inv1[i] = zero ? 0.0 : 1.0 / s1[i];
  }
  for (Eigen::Index i = 0; i < n2; ++i)
    s2[i] = i < n2 - p.rank ? 0.0 : std::sqrt(std::max(e2.values[i], 0.0));

  p.absMf = e1.vectors * s1.cast<cplx>().asDiagonal() * e1.vectors.adjoint();
  p.absMstarf = e2.vectors * s2.cast<cplx>().asDiagonal() * e2.vectors.adjoint();
  p.Vf = M * (e1.vectors * inv1.cast<cplx>().asDiagonal() * e1.vectors.adjoint());

  p.absT = su.cwiseInverse().asDiagonal() * p.absMf * su.asDiagonal();
  p.absTstar = sv.cwiseInverse().asDiagonal() * p.absMstarf * sv.asDiagonal();
  p.V = sv.cwiseInverse().asDiagonal() * p.Vf * su.asDiagonal();
  return p;
}

PolarParts polar_decompose(const DiscreteOperatorSet& ops) {
  return polar_decompose(ops.T, ops.wu, ops.wv);
}

IsospectralReport check_isospectral(const DiscreteOperatorSet& ops) {
  RVec a = herm_eig(frame_H1(ops)).values;
  RVec b = herm_eig(frame_H2(ops)).values;
  double top = std::max(a.size() ? a.maxCoeff() : 0.0, b.size() ? b.maxCoeff() : 0.0);
  double tol = 1e-10 * top;
  std::vector<double> na, nb;
  IsospectralReport r;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) < tol) ++r.zeros_H1;
    else na.push_back(a[i]);
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) < tol) ++r.zeros_H2;
    else nb.push_back(b[i]);
  }
  if (na.size() != nb.size()) {
    r.defect = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < na.size(); ++i)
      r.defect = std::max(r.defect, std::abs(na[i] - nb[i]) / top);
  }
  KernelDims kd = kernel_dimensions(ops);
  r.counts_match_kernels = r.zeros_H1 == kd.ker_T && r.zeros_H2 == kd.ker_Tstar;
  return r;
}

void refine_selfadjoint_pair(const DiscreteOperatorSet& ops, CVec& f, double& mu) {
  CMat H = ops.TstarT();
  CMat A = H - mu * CMat::Identity(H.rows(), H.cols());
  CVec x = Eigen::PartialPivLU<CMat>(A).solve(f);
  x /= std::sqrt(inner_u(ops, x, x).real());
  mu = inner_u(ops, x, H * x).real();
  f = x;
}

void refine_partner_pair(const DiscreteOperatorSet& ops, CVec& g, double& mu) {
  CMat H = ops.TTstar();
  CMat A = H - mu * CMat::Identity(H.rows(), H.cols());
  CVec x = Eigen::PartialPivLU<CMat>(A).solve(g);
  x /= std::sqrt(inner_v(ops, x, x).real());
  mu = inner_v(ops, x, H * x).real();
  g = x;
}

VectorCheck susy_partner_eigvec(const CVec& f, double lambda2, const DiscreteOperatorSet& ops) {
  if (!(std::abs(lambda2) > 1e-10 * sigma_max_dirac(ops)))
    throw std::invalid_argument("susy_partner_eigvec: eigenvalue below tol_zero");
  VectorCheck c;
  c.vector = ops.T * f;
  CVec r = ops.T * (ops.Tstar * c.vector) - lambda2 * c.vector;
  c.residual = std::sqrt(inner_v(ops, r, r).real() / inner_v(ops, c.vector, c.vector).real()) /
               std::abs(lambda2);
  return c;
}

VectorCheck susy_partner_eigvec_reverse(const CVec& g, double mu2, const DiscreteOperatorSet& ops) {
  if (!(std::abs(mu2) > 1e-10 * sigma_max_dirac(ops)))
    throw std::invalid_argument("susy_partner_eigvec_reverse: eigenvalue below tol_zero");
  VectorCheck c;
  c.vector = ops.Tstar * g;
  CVec r = ops.Tstar * (ops.T * c.vector) - mu2 * c.vector;
  c.residual = std::sqrt(inner_u(ops, r, r).real() / inner_u(ops, c.vector, c.vector).real()) /
               std::abs(mu2);
  return c;
}

namespace {

double dirac_relative_residual(const CVec& psi, double lambda, const DiscreteOperatorSet& ops) {
  CVec r = ops.D() * psi - lambda * psi;
  RVec w = ops.frame_weights();
  return norm_frame(w, r) / (std::abs(lambda) * norm_frame(w, psi));
}

} // namespace

VectorCheck dirac_from_h1(const CVec& f, double lambda, const DiscreteOperatorSet& ops) {
  if (!(std::abs(lambda) > 1e-10 * sigma_max_dirac(ops)))
    throw std::invalid_argument("dirac_from_h1: lambda below tol_zero");
  VectorCheck c;
  c.vector.resize(ops.dim());
  c.vector.head(ops.nu()) = f;
  c.vector.tail(ops.nv()) = ops.T * f / lambda;
  c.residual = dirac_relative_residual(c.vector, lambda, ops);
  return c;
}

VectorCheck dirac_from_h2(const CVec& g, double mu, const DiscreteOperatorSet& ops) {
  if (!(std::abs(mu) > 1e-10 * sigma_max_dirac(ops)))
    throw std::invalid_argument("dirac_from_h2: mu below tol_zero");
  VectorCheck c;
  c.vector.resize(ops.dim());
  c.vector.head(ops.nu()) = ops.Tstar * g / mu;
  c.vector.tail(ops.nv()) = g;
  c.residual = dirac_relative_residual(c.vector, mu, ops);
  return c;
}

CVec sigma3(const CVec& psi, int nu) {
  CVec out = psi;
  out.tail(psi.size() - nu) *= -1.0;
  return out;
}

UnitaryReport diagonalizing_unitary(const PolarParts& parts, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu(), nv = ops.nv(), N = nu + nv;
  CMat Q = ops.dirac_frame(false);
  const CMat& V = parts.Vf;
  UnitaryReport r;
  r.U = CMat::Zero(N, N);
  r.U.topLeftCorner(nu, nu).setIdentity();
  r.U.topRightCorner(nu, nv) = V.adjoint();
  r.U.bottomLeftCorner(nv, nu) = -V;
  r.U.bottomRightCorner(nv, nv).setIdentity();
  r.U /= std::sqrt(2.0);

  CMat P = CMat::Zero(N, N);
  P.topLeftCorner(nu, nu) = V.adjoint() * V;
  P.bottomRightCorner(nv, nv) = V * V.adjoint();

  CMat X = P * (r.U * Q * r.U.adjoint()) * P;
  double scale = std::max(operator_norm(Q), 1e-300);
  CMat offb = CMat::Zero(N, N);
  offb.topRightCorner(nu, nv) = X.topRightCorner(nu, nv);
  offb.bottomLeftCorner(nv, nu) = X.bottomLeftCorner(nv, nu);
  r.off_block = operator_norm(offb) / scale;

  CMat target = CMat::Zero(N, N);
  target.topLeftCorner(nu, nu) = parts.absMf;
  target.bottomRightCorner(nv, nv) = -parts.absMstarf;
  r.diag_defect = operator_norm(X - P * target * P) / scale;
  r.unitarity = operator_norm(P * (r.U.adjoint() * r.U - CMat::Identity(N, N)) * P);

  // Nonzero spectra of the diagonal blocks against +-sqrt(sigma(T*T) \ {0}).
  RVec top = herm_eig(X.topLeftCorner(nu, nu)).values;
  RVec bot = herm_eig(X.bottomRightCorner(nv, nv)).values;
  RVec h1 = herm_eig(frame_H1(ops)).values;
  double tol = 1e-8 * scale;
  std::vector<double> want, got_top, got_bot;
  for (Eigen::Index i = 0; i < h1.size(); ++i)
    if (h1[i] > tol * tol * 1e4) want.push_back(std::sqrt(h1[i]));
  for (Eigen::Index i = 0; i < top.size(); ++i)
    if (std::abs(top[i]) > tol) got_top.push_back(top[i]);
  for (Eigen::Index i = 0; i < bot.size(); ++i)
    if (std::abs(bot[i]) > tol) got_bot.push_back(-bot[i]);
  std::sort(want.begin(), want.end());
  std::sort(got_top.begin(), got_top.end());
  std::sort(got_bot.begin(), got_bot.end());
  if (want.size() != got_top.size() || want.size() != got_bot.size()) {
    r.spectrum_defect = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < want.size(); ++i)
      r.spectrum_defect = std::max({r.spectrum_defect, std::abs(want[i] - got_top[i]) / scale,
                                    std::abs(want[i] - got_bot[i]) / scale});
  }
  return r;
}

CMat BlockResolvent::assembled() const {
  CMat X(R11.rows() + R21.rows(), R11.cols() + R12.cols());
  X << R11, R12, R21, R22;
  return X;
}

namespace {

void check_zeta(cplx zeta, const DiscreteOperatorSet& ops) {
  RVec a = herm_eig(frame_H1(ops)).values;
  RVec b = herm_eig(frame_H2(ops)).values;
  cplx z2 = zeta * zeta;
  if (std::min(min_distance(a, z2), min_distance(b, z2)) <= 1e-8)
    throw ResolventError("zeta^2 too close to the spectrum of T*T or TT*");
}

} // namespace

BlockResolvent resolvent_dirac(cplx zeta, const DiscreteOperatorSet& ops) {
  check_zeta(zeta, ops);
  const int nu = ops.nu(), nv = ops.nv();
  cplx z2 = zeta * zeta;
  CMat A1 = inverse(ops.TstarT() - z2 * CMat::Identity(nu, nu));
  CMat A2 = inverse(ops.TTstar() - z2 * CMat::Identity(nv, nv));
  BlockResolvent r;
  r.zeta = zeta;
  r.R11 = zeta * A1;
  r.R12 = ops.Tstar * A2;
  r.R21 = ops.T * A1;
  r.R22 = zeta * A2;
  CMat direct = inverse(ops.D() - zeta * CMat::Identity(nu + nv, nu + nv));
  r.relative_error = (r.assembled() - direct).norm() / direct.norm();
  r.condition = 1.0;
  return r;
}

BlockResolvent resolvent_perturbed(cplx zeta, const DiscreteOperatorSet& ops) {
  check_zeta(zeta, ops);
  const int nu = ops.nu(), nv = ops.nv();
  cplx z2 = zeta * zeta;
  CMat A1 = inverse(ops.TstarT() - z2 * CMat::Identity(nu, nu));
  CMat A2 = inverse(ops.TTstar() - z2 * CMat::Identity(nv, nv));
  CMat Vd = (-I_unit * ops.C.cast<cplx>()).asDiagonal();
  CMat F = CMat::Identity(nu, nu) + zeta * Vd * A1;
  RVec sv = singular_values(F);
  BlockResolvent r;
  r.zeta = zeta;
  r.condition = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff()
                                    : std::numeric_limits<double>::infinity();
  if (r.condition > 1e12) throw ResolventError("inner inverse ill-conditioned (condition > 1e12)");
  CMat Finv = inverse(F);
  CMat VTA2 = Vd * ops.Tstar * A2;
  r.R11 = zeta * A1 * Finv;
  r.R12 = -zeta * A1 * Finv * VTA2 + ops.Tstar * A2;
  r.R21 = ops.T * A1 * Finv;
  r.R22 = -ops.T * A1 * Finv * VTA2 + zeta * A2;
  CMat direct = inverse(ops.DB() - zeta * CMat::Identity(nu + nv, nu + nv));
  r.relative_error = (r.assembled() - direct).norm() / direct.norm();
  return r;
}

double intertwining_defect(const DiscreteOperatorSet& ops, const std::function<double(double)>& f) {
  CMat M = ops.M();
  HermEig e1 = herm_eig(M.adjoint() * M);
  HermEig e2 = herm_eig(M * M.adjoint());
  CMat lhs = M * apply_fn(e1, f);
  CMat rhs = apply_fn(e2, f) * M;
  double fmax = 0.0;
  for (Eigen::Index i = 0; i < e1.values.size(); ++i) fmax = std::max(fmax, std::abs(f(e1.values[i])));
  return (lhs - rhs).norm() / (M.norm() * std::max(fmax, 1e-300));
}

double polar_intertwining_defect(const PolarParts& parts, const DiscreteOperatorSet& ops,
                                 const std::function<double(double)>& f) {
  CMat M = ops.M();
  HermEig e1 = herm_eig(M.adjoint() * M);
  HermEig e2 = herm_eig(M * M.adjoint());
  CMat lhs = parts.Vf * apply_fn(e1, f);
  CMat rhs = apply_fn(e2, f) * parts.Vf;
  double fmax = 0.0;
  for (Eigen::Index i = 0; i < e1.values.size(); ++i) fmax = std::max(fmax, std::abs(f(e1.values[i])));
  return (lhs - rhs).norm() / std::max(fmax, 1e-300);
}

double resolvent_identity_defect(cplx z, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu(), nv = ops.nv();
  CMat lhs = CMat::Identity(nv, nv) + z * inverse(ops.TTstar() - z * CMat::Identity(nv, nv));
  CMat rhs = ops.T * inverse(ops.TstarT() - z * CMat::Identity(nu, nu)) * ops.Tstar;
  return (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
}

EquivalenceReport check_generator_equivalence(const DiscreteOperatorSet& ops) {
  const int nu = ops.nu(), nv = ops.nv();
  EquivalenceReport r;
  CMat M = ops.M();
  Eigen::BDCSVD<CMat> svd(M, Eigen::ComputeFullU);
  RVec s = svd.singularValues();
  double tol = s.size() ? 1e-10 * s.maxCoeff() : 0.0;
  int rank = static_cast<int>((s.array() > tol).count());
  r.in_hypothesis = rank == nu;
  CMat Ur = svd.matrixU().leftCols(rank);
  RVec sv = ops.wv.cwiseSqrt();
  CMat P = sv.cwiseInverse().asDiagonal() * (Ur * Ur.adjoint()) * sv.asDiagonal();

  CMat Umap = CMat::Zero(nu + nv, 2 * nu);
  Umap.topRightCorner(nu, nu).setIdentity();
  Umap.bottomLeftCorner(nv, nu) = -I_unit * ops.T;

  CMat IP = CMat::Zero(nu + nv, nu + nv);
  IP.topLeftCorner(nu, nu).setIdentity();
  IP.bottomRightCorner(nv, nv) = P;
  CMat DBP = ops.DB() * IP;
  CMat lhs = DBP * Umap;
  CMat rhs = Umap * (I_unit * ops.G());
  r.intertwining = (lhs - rhs).norm() / std::max(lhs.norm() + rhs.norm(), 1e-300);

  CMat Wd = ops.frame_weights().cast<cplx>().asDiagonal();
  CMat energy = CMat::Zero(2 * nu, 2 * nu);
  energy.topLeftCorner(nu, nu) = ops.T.adjoint() * ops.wv.cast<cplx>().asDiagonal() * ops.T;
  energy.bottomRightCorner(nu, nu) = ops.wu.cast<cplx>().asDiagonal();
  r.isometry = (Umap.adjoint() * Wd * Umap - energy).norm() / energy.norm();

  RVec sw = ops.frame_weights().cwiseSqrt();
  CMat frame = sw.asDiagonal() * DBP * sw.cwiseInverse().asDiagonal();
  EigResult a = eig_complex(frame, false);
  Spectrum g = eigen_generator(ops, EigenOptions{false});
  double scale = g.op_norm;
  std::vector<cplx> nz_a;
  for (Eigen::Index i = 0; i < a.values.size(); ++i)
    if (std::abs(a.values[i]) > 1e-10 * scale) nz_a.push_back(a.values[i]);
  r.spectrum_distance = multiset_distance(nz_a, g.nonzero()) / scale;
  return r;
}

double trace_ideal_decay_exponent(const DiscreteOperatorSet& ops, int j_lo, int j_hi) {
  RVec mu = herm_eig(frame_H1(ops)).values;  // ascending
  const int n = static_cast<int>(mu.size());
  if (j_hi < 0) j_hi = n / 4;
  if (j_lo < 1 || j_hi <= j_lo || j_hi > n) throw std::invalid_argument("decay window invalid");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    double x = std::log(double(j));
    double y = std::log(1.0 / (mu[j - 1] + 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace dampstring
