#include "dampstring/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "dampstring/format.hpp"

namespace dampstring {

Contour Contour::circle(cplx c, double r) {
  Contour k;
  k.kind = Kind::Circle;
  k.center = c;
  k.radius = r;
  return k;
}

Contour Contour::rectangle(cplx lo, cplx hi) {
  Contour k;
  k.kind = Kind::Rectangle;
  k.lo = lo;
  k.hi = hi;
  k.center = 0.5 * (lo + hi);
  return k;
}

bool Contour::encloses(cplx z) const {
  if (kind == Kind::Circle) return std::abs(z - center) < radius;
  return z.real() > lo.real() && z.real() < hi.real() && z.imag() > lo.imag() && z.imag() < hi.imag();
}

double Contour::distance(cplx z) const {
  if (kind == Kind::Circle) return std::abs(std::abs(z - center) - radius);
  double x = z.real(), y = z.imag();
  double x0 = lo.real(), x1 = hi.real(), y0 = lo.imag(), y1 = hi.imag();
  if (encloses(z)) return std::min({x - x0, x1 - x, y - y0, y1 - y});
  double dx = std::max({x0 - x, 0.0, x - x1});
  double dy = std::max({y0 - y, 0.0, y - y1});
  return std::hypot(dx, dy);
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

CMat rectangle_rule(const BandedMatrix& A, const Contour& c, int per_side) {
  std::vector<double> x, w;
  gauss_legendre(per_side, x, w);
  const int n = A.size();
  cplx corners[5] = {c.lo, {c.hi.real(), c.lo.imag()}, c.hi, {c.lo.real(), c.hi.imag()}, c.lo};
  CMat sum = CMat::Zero(n, n);
  for (int s = 0; s < 4; ++s) {
    cplx a = corners[s], b = corners[s + 1];
    cplx half = 0.5 * (b - a);
    for (int k = 0; k < per_side; ++k) {
      cplx z = 0.5 * (a + b) + half * x[k];
      sum += (w[k] * half) * A.shifted_inverse(z);
    }
  }
  return sum / (-2.0 * M_PI * I_unit);
}

RieszResult quadrature(const BandedMatrix& A, const Contour& contour, const RieszOptions& opt) {
  const int n = A.size();
  RieszResult r;
  if (contour.kind == Contour::Kind::Circle) {
    // Nested trapezoid: each doubling adds the odd nodes.
    int N = std::max(4, opt.initial_nodes);
    CMat S = CMat::Zero(n, n);
    for (int k = 0; k < N; ++k) {
      cplx e = std::polar(1.0, 2.0 * M_PI * k / N);
      S += e * A.shifted_inverse(contour.center + contour.radius * e);
    }
    r.P = -(contour.radius / N) * S;
    while (2 * N <= opt.max_nodes) {
      for (int k = 1; k < 2 * N; k += 2) {
        cplx e = std::polar(1.0, M_PI * k / N);
        S += e * A.shifted_inverse(contour.center + contour.radius * e);
      }
      N *= 2;
      CMat P = -(contour.radius / N) * S;
      r.delta = (P - r.P).norm();
      r.P = std::move(P);
      r.nodes = N;
      if (r.delta <= opt.tol * std::max(1.0, r.P.norm())) {
        r.converged = true;
        break;
      }
    }
    return r;
  }
  int per_side = std::max(2, opt.initial_nodes / 2);
  r.P = rectangle_rule(A, contour, per_side);
  while (4 * 2 * per_side <= opt.max_nodes) {
    per_side *= 2;
    CMat P = rectangle_rule(A, contour, per_side);
    r.delta = (P - r.P).norm();
    r.P = std::move(P);
    r.nodes = 4 * per_side;
    if (r.delta <= opt.tol * std::max(1.0, r.P.norm())) {
      r.converged = true;
      break;
    }
  }
  return r;
}

} // namespace

RieszResult riesz_projection(const BandedMatrix& A, const Contour& contour, const RieszOptions& opt) {
  for (const cplx& l : opt.spectrum)
    if (contour.distance(l) < opt.min_distance) throw ContourError("eigenvalue on the contour");
  RieszResult r = quadrature(A, contour, opt);
  if (!r.P.allFinite()) throw ContourError("non-finite contour quadrature");
  return r;
}

RieszResult riesz_projection(const CMat& A, const Contour& contour, const RieszOptions& opt) {
  if (!opt.spectrum.empty()) return riesz_projection(BandedMatrix(A), contour, opt);
  RieszOptions o = opt;
  CVec ev = eig_complex(A, false).values;
  o.spectrum.assign(ev.data(), ev.data() + ev.size());
  return riesz_projection(BandedMatrix(A), contour, o);
}

namespace {

int rank_above_half(const CMat& P) {
  RVec sv = singular_values(P);
  return static_cast<int>((sv.array() > 0.5).count());
}

} // namespace

Multiplicity multiplicity(cplx lambda0, const CMat& A, double radius) {
  EigResult e = eig_complex(A, false);
  double norm = std::max(1.0, operator_norm(A));
  double near = 10.0 * std::sqrt(std::numeric_limits<double>::epsilon()) * norm;
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double dist = std::abs(e.values[i] - lambda0);
    if (dist > near) d = std::min(d, dist);
  }
  Multiplicity m;
  m.radius = radius > 0.0 ? radius : d / 5.0;
  if (!std::isfinite(m.radius)) m.radius = 1.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double dist = std::abs(e.values[i] - lambda0);
    if (dist >= m.radius && dist <= 2.0 * m.radius)
      throw IsolationError("eigenvalue not isolated within twice the radius");
  }
  RieszOptions opt;
  opt.spectrum.assign(e.values.data(), e.values.data() + e.values.size());
  RieszResult rr = riesz_projection(A, Contour::circle(lambda0, m.radius), opt);
  m.algebraic = rank_above_half(rr.P);
  RVec sv = singular_values(A - lambda0 * CMat::Identity(A.rows(), A.cols()));
  std::sort(sv.data(), sv.data() + sv.size());
  double tol = std::sqrt(std::numeric_limits<double>::epsilon()) * norm;
  m.geometric = static_cast<int>((sv.array() < tol).count());
  m.smallest_singular_values = sv.head(std::min<Eigen::Index>(3, sv.size()));
  return m;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Contour around members that keeps every other eigenvalue at least gap_min away.
// Returns the indices that had to be absorbed instead.
std::vector<int> fit_contour(RieszCluster& c, const std::vector<cplx>& ev) {
  std::vector<bool> in(ev.size(), false);
  for (int i : c.members) in[i] = true;
  double d_ext = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ev.size(); ++j) {
    if (in[j]) continue;
    for (int i : c.members) d_ext = std::min(d_ext, std::abs(ev[j] - ev[i]));
  }
  if (!std::isfinite(d_ext)) d_ext = 1.0;
  c.gap_min = d_ext / 4.0;
  if (c.members.size() == 1) {
    c.contour = Contour::circle(ev[c.members[0]], d_ext / 5.0);
    return {};
  }
  double x0 = ev[c.members[0]].real(), x1 = x0, y0 = ev[c.members[0]].imag(), y1 = y0;
  for (int i : c.members) {
    x0 = std::min(x0, ev[i].real());
    x1 = std::max(x1, ev[i].real());
    y0 = std::min(y0, ev[i].imag());
    y1 = std::max(y1, ev[i].imag());
  }
  double m = c.gap_min;
  c.contour = Contour::rectangle({x0 - m, y0 - m}, {x1 + m, y1 + m});
  std::vector<int> absorb;
  for (std::size_t j = 0; j < ev.size(); ++j)
    if (!in[j] && (c.contour.encloses(ev[j]) || c.contour.distance(ev[j]) < c.gap_min))
      absorb.push_back(static_cast<int>(j));
  return absorb;
}

} // namespace

std::vector<RieszCluster> cluster_eigenvalues(const Spectrum& spec, const ClusterRule& rule) {
  const int N = static_cast<int>(spec.size());
  const std::vector<cplx>& ev = spec.eigenvalues;
  std::vector<int> nz;
  for (int i = 0; i < N; ++i)
    if (!spec.zero_flags[i]) nz.push_back(i);

  std::vector<double> second(N, std::numeric_limits<double>::infinity());
  if (rule.local_spacing) {
    for (int i : nz) {
      double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
      for (int j : nz) {
        if (j == i) continue;
        double d = std::abs(ev[i] - ev[j]);
        if (d < d1) {
          d2 = d1;
          d1 = d;
        } else if (d < d2) {
          d2 = d;
        }
      }
      second[i] = d2;
    }
  }
  double cap = rule.spacing > 0.0 ? rule.spacing : std::numeric_limits<double>::infinity();

  DisjointSets ds(N);
  for (std::size_t a = 0; a < nz.size(); ++a)
    for (std::size_t b = a + 1; b < nz.size(); ++b) {
      int i = nz[a], j = nz[b];
      double thr = rule.fraction * std::min({cap, second[i], second[j]});
      if (std::isfinite(thr) && std::abs(ev[i] - ev[j]) < thr) ds.unite(i, j);
    }
  int zero_root = -1;
  for (int i = 0; i < N; ++i)
    if (spec.zero_flags[i]) {
      if (zero_root < 0) zero_root = i;
      else ds.unite(i, zero_root);
    }

  // Grow contours until no foreign eigenvalue is enclosed or too close.
  for (int pass = 0; pass < N + 1; ++pass) {
    std::vector<std::vector<int>> groups(N);
    for (int i = 0; i < N; ++i) groups[ds.find(i)].push_back(i);
    bool changed = false;
    for (int g = 0; g < N && !changed; ++g) {
      if (groups[g].empty()) continue;
      RieszCluster c;
      c.members = groups[g];
      for (int j : fit_contour(c, ev)) {
        ds.unite(j, g);
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::vector<std::vector<int>> groups(N);
  for (int i = 0; i < N; ++i) groups[ds.find(i)].push_back(i);
  double scale = spec.op_norm > 0.0 ? spec.op_norm : 1.0;
  std::vector<RieszCluster> out;
  for (int g = 0; g < N; ++g) {
    if (groups[g].empty()) continue;
    RieszCluster c;
    c.members = groups[g];
    fit_contour(c, ev);
    double mean_re = 0.0;
    for (int i : c.members) {
      mean_re += ev[i].real();
      if (spec.zero_flags[i]) c.zero_modes = true;
    }
    mean_re /= static_cast<double>(c.members.size());
    c.branch = std::abs(mean_re) <= 1e-9 * scale ? 0 : (mean_re > 0 ? 1 : -1);
    if (c.zero_modes) c.branch = 0;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [&](const RieszCluster& a, const RieszCluster& b) {
    return a.members.front() < b.members.front();
  });
  return out;
}

void compute_projections(std::vector<RieszCluster>& clusters, const DiscreteOperatorSet& ops,
                         const RieszOptions& opt) {
  CMat S = ops.dirac_frame(true);
  std::vector<int> order = band_ordering(ops);
  const int N = static_cast<int>(order.size());
  CMat Sp(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) Sp(i, j) = S(order[i], order[j]);
  BandedMatrix banded(Sp);
  for (RieszCluster& c : clusters) {
    RieszResult r = riesz_projection(banded, c.contour, opt);
    c.projection.resize(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) c.projection(order[i], order[j]) = r.P(i, j);
    c.nodes = r.nodes;
    c.converged = r.converged;
    c.trace = c.projection.trace().real();
    c.rank = rank_above_half(c.projection);
    c.idempotency_defect = operator_norm(c.projection * c.projection - c.projection);
  }
}

namespace {

struct Factor {
  CMat U, V;
  RVec s;
  double norm = 0.0;
  double tail = 0.0;
};

// Nonzero singular values of a projection are >= 1; the rest is quadrature noise.
Factor factorize(const CMat& P) {
  Eigen::BDCSVD<CMat> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec s = svd.singularValues();
  int r = static_cast<int>((s.array() > 0.5).count());
  Factor f;
  f.U = svd.matrixU().leftCols(r);
  f.V = svd.matrixV().leftCols(r);
  f.s = s.head(r);
  f.norm = s.size() ? s[0] : 0.0;
  f.tail = r < s.size() ? s[r] : 0.0;
  return f;
}

} // namespace

ResolutionReport verify_resolution_of_identity(const std::vector<RieszCluster>& clusters,
                                               const Spectrum& spec,
                                               const DiscreteOperatorSet& ops) {
  const int N = ops.dim();
  std::vector<int> seen(spec.size(), 0);
  for (const RieszCluster& c : clusters)
    for (int i : c.members) {
      if (i < 0 || i >= static_cast<int>(spec.size())) throw CoverageError("member index out of range");
      ++seen[i];
    }
  for (int s : seen)
    if (s != 1) throw CoverageError("clusters do not cover every eigenvalue exactly once");

  ResolutionReport r;
  CMat sum = CMat::Zero(N, N);
  std::vector<Factor> factors;
  factors.reserve(clusters.size());
  for (const RieszCluster& c : clusters) {
    if (c.projection.rows() != N) throw CoverageError("projection not computed");
    sum += c.projection;
    r.max_idempotency = std::max(r.max_idempotency, c.idempotency_defect);
    r.max_trace_integrality = std::max(r.max_trace_integrality, std::abs(c.trace - std::round(c.trace)));
    r.rank_total += c.rank;
    if (c.rank != static_cast<int>(c.members.size())) r.ranks_match_members = false;
    factors.push_back(factorize(c.projection));
  }
  r.identity_defect = operator_norm(sum - CMat::Identity(N, N));

  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::size_t j = 0; j < factors.size(); ++j) {
      if (i == j) continue;
      const Factor& a = factors[i];
      const Factor& b = factors[j];
      double core = 0.0;
      if (a.s.size() && b.s.size()) {
        CMat K = a.s.cast<cplx>().asDiagonal() * (a.V.adjoint() * b.U) * b.s.cast<cplx>().asDiagonal();
        core = operator_norm(K);
      }
      double bound = a.norm * b.tail + a.tail * b.norm + a.tail * b.tail;
      r.max_cross = std::max(r.max_cross, core + bound);
    }

  if (spec.has_vectors()) {
    RVec sw = ops.frame_weights().cwiseSqrt();
    for (const RieszCluster& c : clusters)
      for (int i : c.members) {
        CVec v = sw.cast<cplx>().cwiseProduct(spec.vectors.col(i));
        CVec res = v - c.projection * v;
        r.max_subspace_residual = std::max(r.max_subspace_residual, res.norm() / v.norm());
      }
  }
  return r;
}

void write_cluster_csv(std::ostream& os, const std::vector<RieszCluster>& clusters) {
  os << "cluster_id,branch,member_count,center_re,center_im,rank,idempotency_defect\n";
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const RieszCluster& c = clusters[k];
    os << k << ',' << c.branch << ',' << c.members.size() << ',' << fmt_double(c.contour.center.real())
       << ',' << fmt_double(c.contour.center.imag()) << ',' << c.rank << ','
       << fmt_double(c.idempotency_defect) << '\n';
  }
}

} // namespace dampstring
