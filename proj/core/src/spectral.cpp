#include "dampstring/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "dampstring/assignment.hpp"
#include "dampstring/format.hpp"
#include "dampstring/linalg.hpp"

namespace dampstring {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kTridiagonalThreshold = 1500;

double dirac_scale(const DiscreteOperatorSet& ops) {
  return sigma_max_dirac(ops) + ops.sup_damping();
}

// Sort by |lambda| and then by argument; |lambda| is quantized so that
// conjugate partners that differ only by rounding tie on the first key.
std::vector<int> spectral_order(const std::vector<cplx>& ev, double scale) {
  std::vector<int> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  double q = 1e-11 * std::max(scale, 1.0);
  std::vector<long long> key(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) key[i] = std::llround(std::abs(ev[i]) / q);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return std::arg(ev[a]) < std::arg(ev[b]);
  });
  return idx;
}

void finalize(Spectrum& s, const std::vector<cplx>& ev, const std::vector<double>& res,
              const CMat& vecs, double scale) {
  auto order = spectral_order(ev, scale);
  const std::size_t n = ev.size();
  s.eigenvalues.resize(n);
  s.residuals.resize(n);
  s.zero_flags.resize(n);
  s.branch.resize(n);
  if (vecs.size()) s.vectors.resize(vecs.rows(), static_cast<Eigen::Index>(n));
  double branch_tol = 1e-9 * std::max(scale, 1.0);
  s.zero_modes = 0;
  for (std::size_t k = 0; k < n; ++k) {
    int i = order[k];
    s.eigenvalues[k] = ev[i];
    s.residuals[k] = res.empty() ? kNaN : res[i];
    bool zero = std::abs(ev[i]) < s.tol_zero;
    s.zero_flags[k] = zero;
    s.zero_modes += zero ? 1 : 0;
    double re = ev[i].real();
    s.branch[k] = zero ? 0 : (re > branch_tol ? 1 : (re < -branch_tol ? -1 : 0));
    if (vecs.size()) s.vectors.col(static_cast<Eigen::Index>(k)) = vecs.col(i);
  }
}

double integral_of(const CoefficientSpec& rho) {
  if (rho.is_polynomial()) return integrate_product({rho}, 0.0, 1.0);
  const int m = 20000;
  double s = sample(rho, 0.0) + sample(rho, 1.0);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * sample(rho, static_cast<double>(i) / m);
  return s / (3.0 * m);
}

} // namespace

std::vector<cplx> Spectrum::nonzero() const {
  std::vector<cplx> out;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (!zero_flags[i]) out.push_back(eigenvalues[i]);
  return out;
}

Spectrum eigen_dirac(const DiscreteOperatorSet& ops, const EigenOptions& opt) {
  Spectrum s;
  s.source = SpectrumSource::Dirac;
  double smax = sigma_max_dirac(ops);
  s.tol_zero = 1e-10 * smax;
  s.op_norm = smax + ops.sup_damping();

  bool tri = false;
  if (opt.backend == EigenBackend::Tridiagonal) {
    if (opt.vectors || !ops.bc.is_separated())
      throw std::invalid_argument("tridiagonal backend needs separated conditions and no vectors");
    tri = true;
  } else if (opt.backend == EigenBackend::Auto) {
    tri = !opt.vectors && ops.bc.is_separated() && ops.dim() >= kTridiagonalThreshold;
  }

  std::vector<cplx> ev;
  std::vector<double> res;
  CMat vecs;
  if (tri) {
    TridiagonalForm tf = dirac_tridiagonal(ops);
    CVec w = complex_symmetric_tridiagonal_eigenvalues(tf.diag, tf.offdiag.cast<cplx>());
    ev.assign(w.data(), w.data() + w.size());
  } else {
    CMat S = ops.dirac_frame(true);
    EigResult er;
    if (ops.bc.is_real()) {
      // S = -i (real matrix): take eigenvalues mu of i S and map lambda = -i mu.
      er = eig_real((I_unit * S).real(), opt.vectors);
      for (Eigen::Index k = 0; k < er.values.size(); ++k) er.values[k] = -I_unit * er.values[k];
    } else {
      er = eig_complex(S, opt.vectors);
    }
    ev.assign(er.values.data(), er.values.data() + er.values.size());
    if (opt.vectors) {
      RVec sw = ops.frame_weights().cwiseSqrt();
      res.resize(ev.size());
      for (std::size_t k = 0; k < ev.size(); ++k) {
        CVec y = er.vectors.col(static_cast<Eigen::Index>(k));
        res[k] = (S * y - ev[k] * y).norm() / (s.op_norm * y.norm());
      }
      vecs = sw.cwiseInverse().asDiagonal() * er.vectors;
    }
  }
  finalize(s, ev, res, vecs, s.op_norm);
  return s;
}

double generator_energy_norm(const CVec& w, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu();
  CVec Tu = ops.T * w.head(nu);
  double e = (ops.wv.array() * Tu.array().abs2()).sum() +
             (ops.wu.array() * w.tail(nu).array().abs2()).sum();
  return std::sqrt(e);
}

double generator_residual(cplx lambda, const CVec& w, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu();
  CVec u = w.head(nu), v = w.tail(nu);
  CVec r(2 * nu);
  // iG (u, v) = (i v, -i T*T u - i C v)
  r.head(nu) = I_unit * v - lambda * u;
  r.tail(nu) = -I_unit * (ops.Tstar * (ops.T * u)) - I_unit * (ops.C.cast<cplx>().asDiagonal() * v) -
               lambda * v;
  double scale = dirac_scale(ops);
  return generator_energy_norm(r, ops) / (scale * generator_energy_norm(w, ops));
}

double dirac_residual(cplx lambda, const CVec& psi, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu();
  CVec r(ops.dim());
  r.head(nu) = ops.Tstar * psi.tail(ops.nv()) - I_unit * (ops.C.cast<cplx>().asDiagonal() * psi.head(nu)) -
               lambda * psi.head(nu);
  r.tail(ops.nv()) = ops.T * psi.head(nu) - lambda * psi.tail(ops.nv());
  RVec w = ops.frame_weights();
  return norm_frame(w, r) / (dirac_scale(ops) * norm_frame(w, psi));
}

Spectrum eigen_generator(const DiscreteOperatorSet& ops, const EigenOptions& opt) {
  Spectrum s;
  s.source = SpectrumSource::Generator;
  double smax = sigma_max_dirac(ops);
  s.tol_zero = 1e-10 * smax;
  s.op_norm = smax + ops.sup_damping();
  CMat G = ops.G();
  EigResult er;
  if (ops.bc.is_real()) {
    er = eig_real(G.real(), opt.vectors);
  } else {
    er = eig_complex(G, opt.vectors);
  }
  std::vector<cplx> ev(er.values.size());
  for (Eigen::Index k = 0; k < er.values.size(); ++k) ev[k] = I_unit * er.values[k];
  std::vector<double> res;
  CMat vecs;
  if (opt.vectors) {
    vecs = er.vectors;
    res.resize(ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k) {
      CVec w = vecs.col(static_cast<Eigen::Index>(k));
      double e = generator_energy_norm(w, ops);
      if (e > 0.0) vecs.col(static_cast<Eigen::Index>(k)) /= e;
      res[k] = e > 0.0 ? generator_residual(ev[k], vecs.col(static_cast<Eigen::Index>(k)), ops) : kNaN;
    }
  }
  finalize(s, ev, res, vecs, s.op_norm);
  return s;
}

Spectrum eigen_selfadjoint(const DiscreteOperatorSet& ops) {
  Spectrum s;
  s.source = SpectrumSource::SelfAdjoint;
  CMat M = ops.M();
  CMat H = M.adjoint() * M;
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  RVec mu = es.eigenvalues();
  double smax = mu.size() ? std::sqrt(std::max(mu.maxCoeff(), 0.0)) : 0.0;
  s.op_norm = smax * smax;
  s.tol_zero = 1e-10 * s.op_norm;
  std::vector<cplx> ev(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) ev[k] = mu[k];
  s.vectors = ops.wu.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors();
  s.eigenvalues = ev;
  s.residuals.assign(ev.size(), kNaN);
  s.zero_flags.resize(ev.size());
  s.branch.assign(ev.size(), 0);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    s.zero_flags[k] = std::abs(mu[k]) < s.tol_zero;
    s.zero_modes += s.zero_flags[k] ? 1 : 0;
  }
  return s;
}

double pencil_residual(cplx lambda, const CVec& u, const DiscreteOperatorSet& ops) {
  double nu = std::sqrt(inner_u(ops, u, u).real());
  if (!(nu > 0.0)) throw std::invalid_argument("pencil_residual: zero vector");
  CVec r = ops.Tstar * (ops.T * u) - lambda * I_unit * (ops.C.cast<cplx>().asDiagonal() * u) -
           lambda * lambda * u;
  return std::sqrt(inner_u(ops, r, r).real()) / nu;
}

EigenPair generator_pair(const Spectrum& spec, int index, const DiscreteOperatorSet& ops) {
  if (spec.source != SpectrumSource::Generator || !spec.has_vectors())
    throw std::invalid_argument("generator_pair: generator spectrum with vectors required");
  EigenPair p;
  p.lambda = spec.eigenvalues[index];
  p.vector = spec.vectors.col(index);
  p.tag = SpaceTag::NodeNode;
  p.residual = generator_residual(p.lambda, p.vector, ops);
  return p;
}

EigenPair dirac_pair(const Spectrum& spec, int index, const DiscreteOperatorSet& ops) {
  if (spec.source != SpectrumSource::Dirac || !spec.has_vectors())
    throw std::invalid_argument("dirac_pair: Dirac spectrum with vectors required");
  EigenPair p;
  p.lambda = spec.eigenvalues[index];
  p.vector = spec.vectors.col(index);
  p.tag = SpaceTag::NodeCell;
  p.residual = dirac_residual(p.lambda, p.vector, ops);
  return p;
}

EigenPair map_generator_to_dirac(const EigenPair& pair, const DiscreteOperatorSet& ops) {
  if (std::abs(pair.lambda) < 1e-10 * sigma_max_dirac(ops))
    throw std::invalid_argument("map_generator_to_dirac: eigenvalue below tol_zero");
  const int nu = ops.nu();
  CVec psi(ops.dim());
  psi.head(nu) = pair.vector.tail(nu);
  psi.tail(ops.nv()) = -I_unit * (ops.T * pair.vector.head(nu));
  double nrm = norm_frame(ops.frame_weights(), psi);
  if (!(nrm > 0.0)) throw std::runtime_error("map_generator_to_dirac: image vanished");
  EigenPair out;
  out.lambda = pair.lambda;
  out.vector = psi / nrm;
  out.tag = SpaceTag::NodeCell;
  out.residual = dirac_residual(out.lambda, out.vector, ops);
  return out;
}

EigenPair map_dirac_to_generator(const EigenPair& pair, const DiscreteOperatorSet& ops,
                                 double* range_residual) {
  if (std::abs(pair.lambda) < 1e-10 * sigma_max_dirac(ops))
    throw std::invalid_argument("map_dirac_to_generator: zero mode rejected");
  const int nu = ops.nu(), nv = ops.nv();
  CVec psi1 = pair.vector.head(nu), psi2 = pair.vector.tail(nv);
  RVec su = ops.wu.cwiseSqrt(), sv = ops.wv.cwiseSqrt();
  CMat M = ops.M();
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(M);
  cod.setThreshold(1e-10);
  CVec rhs = sv.cast<cplx>().cwiseProduct(psi2);
  CVec wf = cod.solve(rhs);
  CVec w = su.cwiseInverse().cast<cplx>().cwiseProduct(wf);
  double rr = (M * wf - rhs).norm() / rhs.norm();
  if (range_residual) *range_residual = rr;
  if (rr > 1e-8) throw std::runtime_error("map_dirac_to_generator: psi2 outside ran(T)");
  CVec out(2 * nu);
  out.head(nu) = I_unit * w;
  out.tail(nu) = psi1;
  double e = generator_energy_norm(out, ops);
  EigenPair p;
  p.lambda = pair.lambda;
  p.vector = out / e;
  p.tag = SpaceTag::NodeNode;
  p.residual = generator_residual(p.lambda, p.vector, ops);
  return p;
}

SymmetryReport check_symmetry(const Spectrum& spec, const Spectrum* companion, double tolerance) {
  const Spectrum& other = companion ? *companion : spec;
  std::vector<cplx> mirrored;
  mirrored.reserve(other.size());
  for (cplx l : other.eigenvalues) mirrored.push_back(-std::conj(l));
  SymmetryReport r;
  r.tolerance = tolerance;
  r.distance = multiset_distance(spec.eigenvalues, mirrored);
  r.pass = r.distance <= tolerance;
  return r;
}

StripReport check_strip(const Spectrum& spec, const DiscreteOperatorSet& ops, double slack) {
  StripReport r;
  r.bound = ops.sup_damping();
  r.max_im = -std::numeric_limits<double>::infinity();
  for (cplx l : spec.eigenvalues) {
    r.max_abs_im = std::max(r.max_abs_im, std::abs(l.imag()));
    r.max_im = std::max(r.max_im, l.imag());
  }
  r.pass = r.max_abs_im <= r.bound + slack;
  r.dissipative = ops.C.size() == 0 || ops.C.minCoeff() >= 0.0;
  r.one_sided = r.max_im <= slack * std::max(1.0, spec.op_norm);
  return r;
}

AsymptoticFit fit_asymptotics(const Spectrum& spec, const CoefficientSpec& rho, const FitWindow& window) {
  std::vector<double> plus, minus;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.zero_flags[i]) continue;
    if (spec.branch[i] > 0) plus.push_back(spec.eigenvalues[i].real());
    if (spec.branch[i] < 0) minus.push_back(-spec.eigenvalues[i].real());
  }
  std::sort(plus.begin(), plus.end());
  std::sort(minus.begin(), minus.end());
  if (plus.size() < 40 || minus.size() < 40)
    throw std::invalid_argument("fit_asymptotics: fewer than 40 eigenvalues per branch");
  if (!(window.lo > 0.0 && window.hi > window.lo && window.hi <= 1.0))
    throw std::invalid_argument("fit_asymptotics: invalid window");

  auto fit = [&](const std::vector<double>& re, AsymptoticFit* out) {
    const int J = static_cast<int>(re.size());
    int j0 = std::max(1, static_cast<int>(std::ceil(J * window.lo)));
    int j1 = std::min(J, static_cast<int>(std::ceil(J * window.hi)));
    if (j1 - j0 < 1) throw std::invalid_argument("fit_asymptotics: window holds fewer than 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = j1 - j0 + 1;
    for (int j = j0; j <= j1; ++j) {
      double y = re[j - 1];
      sx += j;
      sy += y;
      sxx += double(j) * j;
      sxy += j * y;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double icpt = (sy - slope * sx) / m;
    if (out) {
      out->branch_size = J;
      out->intercept = icpt;
      for (int j = j0; j <= j1; ++j) {
        out->j.push_back(j);
        out->re_lambda.push_back(re[j - 1]);
        out->fit_value.push_back(icpt + slope * j);
      }
    }
    return slope;
  };

  AsymptoticFit r;
  r.slope = fit(plus, &r);
  r.slope_minus = fit(minus, nullptr);
  r.target = std::numbers::pi / integral_of(rho);
  r.relative_deviation = std::abs(r.slope - r.target) / r.target;
  return r;
}

std::vector<cplx> closed_form_constant_damping(double a, int j_max) {
  if (a < 0.0) throw std::invalid_argument("closed_form_constant_damping: a must be >= 0");
  std::vector<cplx> out;
  for (int j = 1; j <= j_max; ++j) {
    double disc = j * j * std::numbers::pi * std::numbers::pi - a * a / 4.0;
    cplx sq = std::sqrt(cplx(disc, 0.0));
    out.push_back(-I_unit * (a / 2.0) - sq);
    out.push_back(-I_unit * (a / 2.0) + sq);
  }
  return out;
}

FactorizationReport verify_factorization_identity(cplx z, const DiscreteOperatorSet& ops) {
  const int n = ops.nu();
  CMat Id = CMat::Identity(n, n);
  CMat H = ops.TstarT();
  CMat R = ops.C.cast<cplx>().asDiagonal();
  CMat L = z * z * Id + z * I_unit * R - H;

  auto block = [&](const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
    CMat X(2 * n, 2 * n);
    X << a, b, c, d;
    return X;
  };
  CMat Z = CMat::Zero(n, n);
  CMat LI = block(L, Z, Z, Id);
  CMat F = block(Id, Z, -z * Id, I_unit * Id);
  CMat Finv = block(Id, Z, -I_unit * z * Id, -I_unit * Id);
  CMat E = block(-z * Id - I_unit * R, -I_unit * Id, Id, Z);
  CMat Einv = block(Z, Id, I_unit * Id, -I_unit * (-z * Id - I_unit * R));
  CMat iGz = I_unit * ops.G() - z * CMat::Identity(2 * n, 2 * n);

  CMat lhs = LI * F;
  CMat rhs = E * iGz;
  FactorizationReport r;
  r.identity_residual = (lhs - rhs).norm() / std::max(lhs.norm() + rhs.norm(), 1e-300);
  CMat I2 = CMat::Identity(2 * n, 2 * n);
  r.e_inverse_residual = (E * Einv - I2).norm() / I2.norm();
  r.f_inverse_residual = (F * Finv - I2).norm() / I2.norm();
  return r;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
  os << "index,re_lambda,im_lambda,residual,zero_mode_flag,branch\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    os << i << ',' << fmt_double(spec.eigenvalues[i].real()) << ','
       << fmt_double(spec.eigenvalues[i].imag()) << ',' << fmt_double(spec.residuals[i]) << ','
       << (spec.zero_flags[i] ? 1 : 0) << ',' << spec.branch[i] << '\n';
  }
}

} // namespace dampstring
