#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dampstring/assignment.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/format.hpp"
#include "dampstring/greens.hpp"
#include "dampstring/random_coefficients.hpp"
#include "dampstring/riesz.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/susy.hpp"
#include "dampstring/trace.hpp"

using namespace dampstring;
using std::numbers::pi;

namespace {

struct Outcome {
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// measured <= tolerance, NaN fails.
Outcome gate(double measured, double tolerance, std::string note = {}) {
  return {measured, tolerance, measured <= tolerance, std::move(note)};
}

Outcome with_runtime(Outcome o, double elapsed, double limit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "runtime %.1f s, limit %.0f s", elapsed, limit);
  o.note += (o.note.empty() ? "" : "; ") + std::string(buf);
  o.pass = o.pass && elapsed < limit;
  return o;
}

const BoundaryCondition kTraceBcs[] = {BoundaryCondition::min(), BoundaryCondition::zero0(),
                                       BoundaryCondition::zero1(), BoundaryCondition::quasi(cplx(0.0, 1.0))};
constexpr int kSeeds = 5;

DiscreteOperatorSet draw(std::uint64_t seed, int n, const BoundaryCondition& bc) {
  auto [rho, alpha] = random_coefficients(seed);
  return assemble(n, rho, alpha, bc);
}

DiscreteOperatorSet constant_ops(int n, const BoundaryCondition& bc, double rho, double alpha) {
  return assemble(n, constant(rho, CoefficientKind::Density), constant(alpha, CoefficientKind::Damping), bc);
}

template <class F>
void for_trace_draws(F&& f) {
  for (const auto& bc : kTraceBcs)
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      DiscreteOperatorSet ops = draw(seed, 64, bc);
      f(ops, eigen_dirac(ops, {false}));
    }
}

Outcome trace_identity_zeroth() {
  auto t0 = Clock::now();
  double worst = 0.0;
  for_trace_draws([&](const DiscreteOperatorSet& ops, const Spectrum& s) {
    double t = trace_coefficient_closed(0, ops);
    worst = std::max(worst, std::abs(eigen_sum(0, s) + t) / std::abs(t));
  });
  return with_runtime(gate(worst, 1e-8, "max over 4 bcs x 5 draws, relative to |tr|"), seconds_since(t0), 10.0);
}

Outcome odd_trace_formula() {
  double worst = 0.0;
  for_trace_draws([&](const DiscreteOperatorSet&, const Spectrum& s) {
    worst = std::max(worst, std::abs(eigen_sum(1, s)) / eigen_sum_scale(1, s));
  });
  return gate(worst, 1e-8, "relative to sum |lambda|^-2");
}

Outcome second_coefficient() {
  double identity = 0.0, paths = 0.0;
  for_trace_draws([&](const DiscreteOperatorSet& ops, const Spectrum& s) {
    double closed = trace_coefficient_closed(1, ops);
    double neumann = trace_coefficient(1, ops);
    identity = std::max(identity, std::abs(eigen_sum(2, s) + closed) / eigen_sum_scale(2, s));
    paths = std::max(paths, std::abs(closed - neumann) / std::max(1.0, std::abs(closed)));
  });
  Outcome o = gate(identity, 1e-6, "identity relative to sum |lambda|^-3");
  char buf[96];
  std::snprintf(buf, sizeof buf, "; closed vs Neumann %.3g (limit 1e-10)", paths);
  o.note += buf;
  o.pass = o.pass && paths <= 1e-10;
  return o;
}

Outcome continuum_t0() {
  auto t0 = Clock::now();
  struct Case {
    BoundaryCondition bc;
    double exact;
  };
  const Case cases[] = {{BoundaryCondition::min(), 1.0 / 6},
                        {BoundaryCondition::zero0(), 0.5},
                        {BoundaryCondition::zero1(), 0.5},
                        {BoundaryCondition::quasi(-1.0), 0.25}};
  double worst_ratio = 1e300;
  int at_floor = 0;
  for (const Case& c : cases) {
    std::vector<double> err;
    std::vector<int> grids{64, 128, 256, 512};
    for (int n : grids) err.push_back(std::abs(trace_coefficient_closed(0, constant_ops(n, c.bc, 1.0, 1.0)) - c.exact));
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
      // Roundoff in a trace over n cells grows like n eps.
      if (err[k + 1] <= 1e-14 * grids[k + 1] * std::max(1.0, c.exact)) {
        ++at_floor;
        continue;
      }
      worst_ratio = std::min(worst_ratio, err[k] / err[k + 1]);
    }
  }
  Outcome o{-worst_ratio, -3.0, worst_ratio >= 3.0,
            "negated smallest error ratio; " + std::to_string(at_floor) + " of 12 steps at the roundoff floor"};
  return with_runtime(o, seconds_since(t0), 60.0);
}

std::vector<cplx> first_pairs(const Spectrum& s, int count) {
  std::vector<cplx> plus, minus;
  for (const cplx& l : s.eigenvalues) {
    if (l.real() > 1e-9) plus.push_back(l);
    if (l.real() < -1e-9) minus.push_back(l);
  }
  auto by_abs_re = [](const cplx& a, const cplx& b) { return std::abs(a.real()) < std::abs(b.real()); };
  std::sort(plus.begin(), plus.end(), by_abs_re);
  std::sort(minus.begin(), minus.end(), by_abs_re);
  std::vector<cplx> out;
  for (int j = 0; j < count; ++j) {
    out.push_back(minus.at(j));
    out.push_back(plus.at(j));
  }
  return out;
}

Outcome constant_damping_eigenvalues() {
  std::vector<cplx> exact = closed_form_constant_damping(0.5, 10);
  auto max_rel = [&](int n) {
    std::vector<cplx> got = first_pairs(eigen_dirac(constant_ops(n, BoundaryCondition::min(), 1.0, 0.5), {false}), 10);
    double e = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) e = std::max(e, std::abs(got[k] - exact[k]) / std::abs(exact[k]));
    return e;
  };
  double e256 = max_rel(256), e512 = max_rel(512);
  double order = std::log2(e256 / e512);
  Outcome o = gate(e512, 1e-3, "max relative error of 10 pairs at n=512");
  o.note += "; observed order " + fmt_double(order) + " (limit 1.5)";
  o.pass = o.pass && order >= 1.5;
  return o;
}

Outcome continuum_t2() {
  std::vector<double> t;
  for (int n : {64, 128, 256, 512}) t.push_back(trace_coefficient_closed(1, constant_ops(n, BoundaryCondition::min(), 1.0, 1.0)));
  // Two Richardson levels for O(h^2) + O(h^4).
  std::vector<double> r1, r2;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) r1.push_back((4 * t[k + 1] - t[k]) / 3);
  for (std::size_t k = 0; k + 1 < r1.size(); ++k) r2.push_back((16 * r1[k + 1] - r1[k]) / 15);
  double value = -r2.back();
  return gate(std::abs(value - (1.0 / 945 - 1.0 / 30)), 1e-3, "extrapolated -t2 = " + fmt_double(value));
}

Outcome supersymmetry() {
  double iso = 0.0, off = 0.0, res = 0.0;
  for (const auto& bc : {BoundaryCondition::max(), BoundaryCondition::min(), BoundaryCondition::zero0(),
                         BoundaryCondition::zero1(), BoundaryCondition::quasi(1.0),
                         BoundaryCondition::quasi(cplx(0.0, 1.0)), BoundaryCondition::quasi(-1.0)}) {
    DiscreteOperatorSet ops = constant_ops(16, bc, 1.0, 1.0);
    iso = std::max(iso, check_isospectral(ops).defect);
    off = std::max(off, diagonalizing_unitary(polar_decompose(ops), ops).off_block);
    for (cplx z : {cplx(0.3, 0.1), cplx(0.2, 0.0)}) {
      CMat dense_d = (ops.D() - z * CMat::Identity(ops.dim(), ops.dim())).inverse();
      CMat dense_p = (ops.DB() - z * CMat::Identity(ops.dim(), ops.dim())).inverse();
      res = std::max(res, (resolvent_dirac(z, ops).assembled() - dense_d).norm() / dense_d.norm());
      res = std::max(res, (resolvent_perturbed(z, ops).assembled() - dense_p).norm() / dense_p.norm());
    }
  }
  Outcome o = gate(iso, 1e-10, "isospectral defect");
  char buf[160];
  std::snprintf(buf, sizeof buf, "; off-block %.3g (limit 1e-9); block resolvents %.3g (limit 1e-11)", off, res);
  o.note += buf;
  o.pass = o.pass && off <= 1e-9 && res <= 1e-11;
  return o;
}

Outcome generator_equivalence() {
  double spec = 0.0, maps = 0.0, fact = 0.0;
  for (const auto& bc : kTraceBcs)
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      DiscreteOperatorSet ops = draw(seed, 32, bc);
      Spectrum d = eigen_dirac(ops);
      Spectrum g = eigen_generator(ops);
      spec = std::max(spec, multiset_distance(d.nonzero(), g.nonzero()) / d.op_norm);
      for (int k = 0; k < static_cast<int>(g.size()); ++k)
        if (!g.zero_flags[k]) maps = std::max(maps, map_generator_to_dirac(generator_pair(g, k, ops), ops).residual);
      for (int k = 0; k < static_cast<int>(d.size()); ++k)
        if (!d.zero_flags[k]) maps = std::max(maps, map_dirac_to_generator(dirac_pair(d, k, ops), ops).residual);
      fact = std::max(fact, verify_factorization_identity(cplx(0.7, 0.3), ops).identity_residual);
    }
  Outcome o = gate(spec, 1e-8, "nonzero spectra distance relative to the operator norm");
  char buf[160];
  std::snprintf(buf, sizeof buf, "; eigenvector maps %.3g (limit 1e-7); factorization %.3g (limit 1e-12)", maps, fact);
  o.note += buf;
  o.pass = o.pass && maps <= 1e-7 && fact <= 1e-12;
  return o;
}

Outcome asymptotic_slopes() {
  auto t0 = Clock::now();
  double worst = 0.0;
  for (const CoefficientSpec& rho : {constant(1.0, CoefficientKind::Density), constant(2.0, CoefficientKind::Density),
                                     polynomial({1.0, 1.0}, CoefficientKind::Density)}) {
    DiscreteOperatorSet ops = assemble(2048, rho, constant(1.0), BoundaryCondition::min());
    worst = std::max(worst, fit_asymptotics(eigen_dirac(ops, {false}), rho).relative_deviation);
  }
  return with_runtime(gate(worst, 0.02, "relative slope deviation, rho in {1, 2, 1+x}, n=2048"), seconds_since(t0),
                      120.0);
}

Outcome strip_and_symmetry() {
  double strip = -1e300, sym = 0.0;
  const cplx omegas[] = {cplx(0.0, 1.0), cplx(0.5, 0.3), cplx(-2.0, 0.0)};
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    auto [rho, alpha] = random_coefficients(seed);
    for (const auto& bc : {BoundaryCondition::max(), BoundaryCondition::min(), BoundaryCondition::zero0(),
                           BoundaryCondition::zero1(), BoundaryCondition::quasi(1.0)}) {
      DiscreteOperatorSet ops = assemble(64, rho, alpha, bc);
      Spectrum s = eigen_dirac(ops, {false});
      StripReport r = check_strip(s, ops);
      strip = std::max(strip, r.max_abs_im - r.bound);
      sym = std::max(sym, check_symmetry(s).distance);
    }
    for (cplx w : omegas) {
      DiscreteOperatorSet ops = assemble(64, rho, alpha, BoundaryCondition::quasi(w));
      Spectrum s = eigen_dirac(ops, {false});
      Spectrum c = eigen_dirac(assemble(64, rho, alpha, BoundaryCondition::quasi(std::conj(w))), {false});
      StripReport r = check_strip(s, ops);
      strip = std::max(strip, r.max_abs_im - r.bound);
      sym = std::max(sym, check_symmetry(s, &c).distance);
    }
  }
  Outcome o = gate(strip, 1e-10, "max|Im lambda| - sup alpha/rho^2");
  o.note += "; symmetry distance " + fmt_double(sym) + " (limit 1e-8)";
  o.pass = o.pass && sym <= 1e-8;
  return o;
}

Outcome riesz_structure() {
  double idem = 0.0, ident = 0.0, cross = 0.0;
  auto run = [&](const DiscreteOperatorSet& ops, double spacing) {
    Spectrum s = eigen_dirac(ops);
    ClusterRule rule;
    rule.spacing = spacing;
    std::vector<RieszCluster> c = cluster_eigenvalues(s, rule);
    compute_projections(c, ops);
    ResolutionReport r = verify_resolution_of_identity(c, s, ops);
    idem = std::max(idem, r.max_idempotency);
    ident = std::max(ident, r.identity_defect);
    cross = std::max(cross, r.max_cross);
  };
  run(constant_ops(64, BoundaryCondition::min(), 1.0, 1.0), pi);
  auto [rho, alpha] = random_coefficients(1);
  run(assemble(64, constant(1.0, CoefficientKind::Density), alpha, BoundaryCondition::quasi(cplx(0.0, 1.0))), pi);
  Outcome o = gate(idem, 1e-8, "idempotency");
  char buf[160];
  std::snprintf(buf, sizeof buf, "; identity %.3g (limit 1e-6); cross products %.3g (limit 1e-7)", ident, cross);
  o.note += buf;
  o.pass = o.pass && ident <= 1e-6 && cross <= 1e-7;
  return o;
}

Outcome kernel_census() {
  struct Row {
    BoundaryCondition bc;
    int t, ts, d;
  };
  const Row rows[] = {{BoundaryCondition::max(), 1, 0, 1},         {BoundaryCondition::min(), 0, 1, 1},
                      {BoundaryCondition::zero0(), 0, 0, 0},       {BoundaryCondition::zero1(), 0, 0, 0},
                      {BoundaryCondition::quasi(1.0), 1, 1, 2},    {BoundaryCondition::quasi(cplx(0.0, 1.0)), 0, 0, 0},
                      {BoundaryCondition::quasi(-1.0), 0, 0, 0}};
  int mismatches = 0;
  for (int n : {8, 32, 128})
    for (const Row& r : rows) {
      KernelDims k = kernel_dimensions(constant_ops(n, r.bc, 1.0, 1.0));
      mismatches += (k.ker_T != r.t) + (k.ker_Tstar != r.ts) + (k.ker_D != r.d) + k.ambiguous;
    }
  return gate(mismatches, 0.0, "integer mismatches over 7 bcs x 3 grids");
}

Outcome resolvent_parity() {
  double parity = 0.0, agree = 0.0;
  for (const auto& bc : kTraceBcs) {
    ResolventTrace r = resolvent_trace_expansion(0.1, constant_ops(32, bc, 1.0, 1.0));
    parity = std::max(parity, r.parity_defect);
    agree = std::max(agree, r.agreement);
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      ResolventTrace q = resolvent_trace_expansion(0.1, draw(seed, 32, bc));
      parity = std::max(parity, q.parity_defect);
      agree = std::max(agree, q.agreement);
    }
  }
  Outcome o = gate(parity, 1e-10, "parity defect at +-0.1");
  o.note += "; lhs/rhs agreement " + fmt_double(agree) + " (limit 1e-10)";
  o.pass = o.pass && agree <= 1e-10;
  return o;
}

Outcome livsic() {
  double gap = 0.0;
  bool inequality = true;
  for (const auto& bc : kTraceBcs)
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      LivsicReport r = livsic_check(draw(seed, 64, bc), 0.1);
      gap = std::max(gap, std::abs(r.gap));
      inequality = inequality && r.eigen_sum <= r.trace_im + 1e-9;
    }
  Outcome o = gate(gap, 1e-9, "|tr Im R - sum Im lambda(R)|");
  o.note += inequality ? "; inequality holds for all draws" : "; inequality violated";
  o.pass = o.pass && inequality;
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"trace identity, zeroth order", trace_identity_zeroth},
      {"odd trace formula", odd_trace_formula},
      {"second trace coefficient", second_coefficient},
      {"continuum t0 convergence", continuum_t0},
      {"constant-damping eigenvalues", constant_damping_eigenvalues},
      {"continuum t2 value", continuum_t2},
      {"supersymmetry suite", supersymmetry},
      {"generator and Dirac equivalence", generator_equivalence},
      {"asymptotic branch slopes", asymptotic_slopes},
      {"spectral strip and symmetry", strip_and_symmetry},
      {"Riesz projection structure", riesz_structure},
      {"kernel census", kernel_census},
      {"resolvent-trace parity", resolvent_parity},
      {"Livsic relation", livsic},
  };
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {std::nan(""), 0.0, false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-32s  measured=%s  tolerance=%s  (%s)\n", o.pass ? "PASS" : "FAIL", index, c.title,
                fmt_double(o.measured).c_str(), fmt_double(o.tolerance).c_str(), o.note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
