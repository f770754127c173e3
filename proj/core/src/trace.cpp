#include "dampstring/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "dampstring/format.hpp"
#include "dampstring/greens.hpp"
#include "dampstring/linalg.hpp"

namespace dampstring {

namespace {

CMat inverse_checked(const CMat& A) {
  Eigen::FullPivLU<CMat> lu(A);
  RVec sv = singular_values(A);
  if (sv.size() == 0 || sv.minCoeff() <= 1e-12 * sv.maxCoeff())
    throw SingularOperatorError("T*T is numerically singular");
  return lu.inverse();
}

} // namespace

std::vector<CMat> neumann_coefficients(const DiscreteOperatorSet& ops, int p_max) {
  CMat K = inverse_checked(ops.TstarT());
  CVec iC = I_unit * ops.C.cast<cplx>();
  std::vector<CMat> M;
  M.reserve(p_max + 1);
  M.push_back(K);
  if (p_max >= 1) M.push_back(K * (iC.asDiagonal() * K));
  for (int p = 2; p <= p_max; ++p) M.push_back(K * (M[p - 2] + iC.asDiagonal() * M[p - 1]));
  return M;
}

std::vector<double> series_coefficients(const DiscreteOperatorSet& ops, int m_max) {
  std::vector<CMat> M = neumann_coefficients(ops, m_max);
  CVec iC = I_unit * ops.C.cast<cplx>();
  std::vector<double> t(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    cplx tr = (iC.asDiagonal() * M[m]).trace();
    if (m >= 1) tr += 2.0 * M[m - 1].trace();
    t[m] = tr.imag();
  }
  return t;
}

double trace_coefficient(int n, const DiscreteOperatorSet& ops) {
  if (n < 0) throw std::invalid_argument("trace_coefficient: n < 0");
  return series_coefficients(ops, 2 * n)[2 * n];
}

double trace_coefficient_closed(int n, const DiscreteOperatorSet& ops) {
  CMat K = inverse_checked(ops.TstarT());
  CMat CK = ops.C.cast<cplx>().asDiagonal() * K;
  if (n == 0) return CK.trace().real();
  if (n == 1) return (3.0 * (CK * K).trace() - (CK * CK * CK).trace()).real();
  throw std::invalid_argument("trace_coefficient_closed: only n = 0, 1");
}

double eigen_sum(int m, const Spectrum& spec) {
  std::vector<cplx> nz = spec.nonzero();
  if (nz.empty()) throw std::invalid_argument("eigen_sum: empty spectrum");
  double s = 0.0;
  for (cplx l : nz) s -= std::pow(l, -(m + 1)).imag();
  return s;
}

double eigen_sum_scale(int m, const Spectrum& spec) {
  double s = 0.0;
  for (cplx l : spec.nonzero()) s += std::pow(std::abs(l), -(m + 1));
  return s;
}

TraceDiscrepancy verify_trace_identity(int n, const DiscreteOperatorSet& ops, const Spectrum& spec) {
  std::vector<double> t = series_coefficients(ops, 2 * n);
  TraceDiscrepancy d;
  d.even = std::abs(eigen_sum(2 * n, spec) + t[2 * n]);
  d.odd = std::abs(eigen_sum(2 * n + 1, spec));
  d.scale_even = eigen_sum_scale(2 * n, spec);
  d.scale_odd = eigen_sum_scale(2 * n + 1, spec);
  return d;
}

double reduced_resolvent_trace(double zeta, const DiscreteOperatorSet& ops) {
  const int nu = ops.nu();
  CMat iC = (I_unit * ops.C.cast<cplx>()).asDiagonal();
  CMat L = ops.TstarT() - zeta * zeta * CMat::Identity(nu, nu) - zeta * iC;
  CMat X = (2.0 * zeta * CMat::Identity(nu, nu) + iC) * Eigen::PartialPivLU<CMat>(L).inverse();
  return X.trace().imag();
}

namespace {

double direct_resolvent_trace(double zeta, const DiscreteOperatorSet& ops, const CMat& S) {
  RVec sv = singular_values(S - zeta * CMat::Identity(S.rows(), S.cols()));
  if (sv.minCoeff() <= 1e-8 * std::max(1.0, sv.maxCoeff()))
    throw std::invalid_argument("resolvent_trace_expansion: zeta in the spectrum");
  (void)ops;
  CMat R = Eigen::PartialPivLU<CMat>(S - zeta * CMat::Identity(S.rows(), S.cols())).inverse();
  // tr of the anti-Hermitian part (R - R*) / 2i
  return ((R - R.adjoint()) / (2.0 * I_unit)).trace().real();
}

} // namespace

ResolventTrace resolvent_trace_expansion(double zeta, const DiscreteOperatorSet& ops) {
  CMat S = ops.dirac_frame(true);
  ResolventTrace r;
  r.zeta = zeta;
  r.lhs = direct_resolvent_trace(zeta, ops, S);
  r.lhs_minus = direct_resolvent_trace(-zeta, ops, S);
  r.rhs = reduced_resolvent_trace(zeta, ops);
  r.rhs_minus = reduced_resolvent_trace(-zeta, ops);
  r.parity_defect = std::max(std::abs(r.lhs - r.lhs_minus), std::abs(r.rhs - r.rhs_minus));
  r.agreement = std::max(std::abs(r.lhs - r.rhs), std::abs(r.lhs_minus - r.rhs_minus));
  return r;
}

SeriesFit series_fit(const Spectrum& spec, int m_max, double half_width, int degree, int samples) {
  std::vector<cplx> nz = spec.nonzero();
  RMat V(samples, degree + 1);
  RVec f(samples);
  for (int k = 0; k < samples; ++k) {
    double s = std::cos(M_PI * (k + 0.5) / samples);
    double zeta = half_width * s;
    double acc = 0.0;
    for (cplx l : nz) acc += (1.0 / (l - zeta)).imag();
    f[k] = acc;
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= s) V(k, d) = p;
  }
  RVec c = V.colPivHouseholderQr().solve(f);
  SeriesFit out;
  for (int m = 0; m <= m_max; ++m) {
    double coeff = c[m] / std::pow(half_width, m);
    double expected = -eigen_sum(m, spec);
    out.coefficients.push_back(coeff);
    out.expected.push_back(expected);
    out.max_defect = std::max(out.max_defect, std::abs(coeff - expected) /
                                                  std::max(1.0, eigen_sum_scale(m, spec)));
  }
  return out;
}

RegularizedSum regularized_sum_check(const Spectrum& spec, const CoefficientSpec& alpha, int j_cut) {
  std::vector<cplx> plus, minus, imag;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec.zero_flags[i]) continue;
    if (spec.branch[i] > 0) plus.push_back(spec.eigenvalues[i]);
    else if (spec.branch[i] < 0) minus.push_back(spec.eigenvalues[i]);
    else imag.push_back(spec.eigenvalues[i]);
  }
  if (plus.size() != minus.size() || imag.size() % 2 != 0)
    throw PairingError("unmatched branch sizes");
  auto by_re = [](cplx a, cplx b) { return std::abs(a.real()) < std::abs(b.real()); };
  std::sort(plus.begin(), plus.end(), by_re);
  std::sort(minus.begin(), minus.end(), by_re);
  std::sort(imag.begin(), imag.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });

  RegularizedSum r;
  double integral = integrate_product({alpha}, 0.0, 1.0);
  r.c0 = -0.5 * I_unit * integral;
  r.target = 0.25 * I_unit * (sample(alpha, 0.0) + sample(alpha, 1.0)) + r.c0;

  std::vector<cplx> terms;
  for (std::size_t k = 0; k < imag.size() / 2; ++k)
    terms.push_back(imag[k] + imag[imag.size() - 1 - k] - 2.0 * r.c0);
  for (std::size_t k = 0; k < plus.size(); ++k) terms.push_back(plus[k] + minus[k] - 2.0 * r.c0);
  int total = static_cast<int>(terms.size());
  r.pairs = j_cut > 0 ? std::min(j_cut, total) : std::max(1, total / 4);
  cplx acc = 0.0;
  for (int j = 0; j < r.pairs; ++j) {
    acc += terms[j];
    r.terms.push_back(terms[j]);
    r.partial_sums.push_back(acc);
  }
  return r;
}

LivsicReport livsic_check(const DiscreteOperatorSet& ops, double zeta) {
  CMat S = ops.dirac_frame(true);
  const Eigen::Index N = S.rows();
  LivsicReport r;
  r.shift = I_unit * (ops.sup_damping() + 1.0) + zeta;
  CMat R = Eigen::PartialPivLU<CMat>(S - r.shift * CMat::Identity(N, N)).inverse();
  EigResult e = eig_complex(R, false);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) r.eigen_sum += e.values[i].imag();
  CMat ImR = (R - R.adjoint()) / (2.0 * I_unit);
  r.trace_im = ImR.trace().real();
  r.gap = r.trace_im - r.eigen_sum;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (ImR + ImR.adjoint()), Eigen::EigenvaluesOnly);
  r.min_eig_im = es.eigenvalues().minCoeff();
  r.inequality = r.eigen_sum <= r.trace_im + 1e-9;
  return r;
}

TraceLedger build_trace_ledger(const DiscreteOperatorSet& ops, const Spectrum& spec,
                               const CoefficientSpec& alpha, int n_max) {
  TraceLedger L;
  L.bc = ops.bc.name();
  L.n_grid = ops.grid.n;
  L.n_max = n_max;
  std::vector<double> s = series_coefficients(ops, 2 * n_max + 1);
  for (int n = 0; n <= n_max; ++n) L.t.push_back(s[2 * n]);
  for (int n = 0; n <= std::min(n_max, 1); ++n) L.t_closed.push_back(trace_coefficient_closed(n, ops));
  try {
    L.t0_continuum = t0_analytic(ops.bc, alpha);
  } catch (const std::exception&) {
    L.t0_continuum = std::numeric_limits<double>::quiet_NaN();
  }
  for (int m = 0; m <= 2 * n_max + 1; ++m) L.lhs.push_back(eigen_sum(m, spec));
  for (int n = 0; n <= n_max; ++n) {
    TraceDiscrepancy d;
    d.even = std::abs(L.lhs[2 * n] + s[2 * n]);
    d.odd = std::abs(L.lhs[2 * n + 1]);
    d.scale_even = eigen_sum_scale(2 * n, spec);
    d.scale_odd = eigen_sum_scale(2 * n + 1, spec);
    L.discrepancies.push_back(d);
  }
  L.zero_modes = spec.zero_modes;
  return L;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return fmt_double(v);
}

} // namespace

void write_trace_ledger_json(std::ostream& os, const TraceLedger& L) {
  nlohmann::ordered_json j;
  j["bc"] = L.bc;
  j["n_grid"] = L.n_grid;
  j["n_max"] = L.n_max;
  j["t"] = nlohmann::ordered_json::array();
  for (double v : L.t) j["t"].push_back(number(v));
  j["t_closed"] = nlohmann::ordered_json::array();
  for (double v : L.t_closed) j["t_closed"].push_back(number(v));
  j["lhs"] = nlohmann::ordered_json::array();
  for (double v : L.lhs) j["lhs"].push_back(number(v));
  j["discrepancies"] = nlohmann::ordered_json::array();
  for (const auto& d : L.discrepancies)
    j["discrepancies"].push_back({{"even", number(d.even)},
                                  {"odd", number(d.odd)},
                                  {"scale_even", number(d.scale_even)},
                                  {"scale_odd", number(d.scale_odd)}});
  j["zero_modes"] = L.zero_modes;
  j["continuum"] = {{"t0_analytic", number(L.t0_continuum)}};
  os << j.dump(2) << '\n';
}

} // namespace dampstring
