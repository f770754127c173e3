#include "dampstring/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "dampstring/assignment.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/greens.hpp"
#include "dampstring/linalg.hpp"
#include "dampstring/random_coefficients.hpp"
#include "dampstring/riesz.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/susy.hpp"
#include "dampstring/trace.hpp"

namespace dampstring {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
void guarded(VerificationReport& rep, const std::string& name, const std::string& anchor, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    rep.error(name, anchor, e.what());
  }
}

void write_file(const std::string& dir, const std::string& name,
                const std::function<void(std::ostream&)>& writer) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name);
  if (!os) throw std::runtime_error("cannot write " + name);
  writer(os);
}

DiscreteOperatorSet make_ops(const CommandContext& ctx, int n) {
  return assemble(n, ctx.problem.rho, ctx.problem.alpha, ctx.problem.bc);
}

bool is_smooth(const CoefficientSpec& s) { return s.pieces.size() == 1 && s.is_polynomial(); }

bool is_constant(const CoefficientSpec& s, double* value = nullptr) {
  if (!is_smooth(s)) return false;
  const auto& p = s.pieces[0].num;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] != 0.0) return false;
  if (value) *value = p.empty() ? 0.0 : p[0];
  return true;
}

bool invertible_H1(const BoundaryCondition& bc) {
  using K = BoundaryCondition::Kind;
  return bc.kind != K::Max && !(bc.kind == K::Quasi && bc.omega == cplx(1.0, 0.0));
}

// Smallest log2 ratio of successive errors; pairs whose finer error is at the
// roundoff floor count as converged.
double min_order(const std::vector<double>& err, const std::vector<double>& floor) {
  double m = kInf;
  for (std::size_t k = 0; k + 1 < err.size(); ++k) {
    if (err[k + 1] <= floor[k + 1]) continue;
    m = std::min(m, std::log2(err[k] / err[k + 1]));
  }
  return m;
}

cplx first_eigenvalue(const Spectrum& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.zero_flags[i] && s.eigenvalues[i].real() >= -1e-12) return s.eigenvalues[i];
  throw std::runtime_error("no nonzero eigenvalue with Re >= 0");
}

} // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "greens", "trace", "resolvent-check",
                                              "susy-check", "asymptotics", "riesz", "verify-all"};
  return names;
}

void spectrum_suite(const CommandContext& ctx, VerificationReport& rep) {
  const int n = ctx.cfg.n_grid;
  DiscreteOperatorSet ops = make_ops(ctx, n);
  bool vectors = ops.dim() <= 1500;
  Spectrum spec = eigen_dirac(ops, EigenOptions{vectors});
  write_file(ctx.out_dir, "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spec); });
  write_file(ctx.out_dir, "scatter.csv", [&](std::ostream& os) { write_scatter(os, spec); });

  rep.check_bool("spectrum.row_count", "dof-count", static_cast<int>(spec.size()) == ops.dim(),
                 static_cast<double>(spec.size()), ops.dim());
  if (vectors) {
    double rmax = 0.0;
    for (double r : spec.residuals) rmax = std::max(rmax, r);
    rep.check("spectrum.residual_max", "dirac-residual", rmax, 1e-8);
  }
  // Null space of D + B by singular values; equals ker D when alpha vanishes on ker T.
  RVec sv = singular_values(ops.dirac_frame(true));
  int nullity = static_cast<int>((sv.array() < spec.tol_zero).count());
  rep.check_bool("spectrum.zero_modes", "kernel-census", spec.zero_modes == nullity, spec.zero_modes,
                 nullity);
  StripReport strip = check_strip(spec, ops);
  rep.check("spectrum.strip", "spectral-strip", strip.max_abs_im - strip.bound, 1e-10,
            "max|Im| minus sup alpha/rho^2");
  if (vectors) {
    guarded(rep, "spectrum.symmetry", "spectral-symmetry", [&] {
      SymmetryReport sym;
      if (ops.bc.is_real()) {
        sym = check_symmetry(spec);
      } else {
        DiscreteOperatorSet conj = assemble(n, ctx.problem.rho, ctx.problem.alpha, ops.bc.conjugate());
        Spectrum other = eigen_dirac(conj, EigenOptions{false});
        sym = check_symmetry(spec, &other);
      }
      rep.check("spectrum.symmetry", "spectral-symmetry", sym.distance / spec.op_norm, 1e-8,
                "relative to the operator norm");
    });
  }
}

void greens_suite(const CommandContext& ctx, VerificationReport& rep) {
  const BoundaryCondition& bc = ctx.problem.bc;
  if (!invertible_H1(bc)) {
    rep.report_only("greens.skipped", "greens-kernel", 0.0, "T*T has a kernel for " + bc.name());
    return;
  }
  const int n0 = ctx.cfg.n_grid;
  bool smooth = is_smooth(ctx.problem.rho) && is_smooth(ctx.problem.alpha);
  std::vector<int> grids{n0, 2 * n0, 4 * n0, 8 * n0};

  guarded(rep, "greens.t0_order", "t0-continuum", [&] {
    double t0a = t0_analytic(bc, ctx.problem.alpha);
    std::vector<double> err_t0;
    std::vector<cplx> eig1;
    for (int n : grids) {
      DiscreteOperatorSet ops = make_ops(ctx, n);
      err_t0.push_back(std::abs(trace_coefficient_closed(0, ops) - t0a));
      eig1.push_back(first_eigenvalue(eigen_dirac(ops, EigenOptions{false})));
    }
    cplx ref = (4.0 * eig1.back() - eig1[eig1.size() - 2]) / 3.0;
    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < grids.size(); ++k)
      rows.push_back({grids[k], err_t0[k], std::abs(eig1[k] - ref)});
    write_file(ctx.out_dir, "convergence.csv", [&](std::ostream& os) { write_convergence(os, rows); });
    // Roundoff in a trace over n cells grows like n eps.
    std::vector<double> floor;
    for (int n : grids) floor.push_back(1e-14 * n * std::max(1.0, std::abs(t0a)));
    double order = min_order(err_t0, floor);
    if (smooth) rep.check("greens.t0_order", "t0-continuum", -order, -1.5, "negated observed order");
    else rep.report_only("greens.t0_order", "t0-continuum", order, "non-smooth coefficients");
    rep.report_only("greens.t0_error_finest", "t0-continuum", err_t0.back());
    std::vector<double> e1;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) e1.push_back(rows[k].err_eig1);
    rep.report_only("greens.eig1_order", "eigenvalue-convergence", min_order(e1, std::vector<double>(e1.size(), 1e-13)));
  });

  guarded(rep, "greens.kernel_order", "greens-kernel", [&] {
    auto f = [](double x) { return cplx(1.0 + x * x); };
    std::vector<double> err;
    for (int n : {n0, 2 * n0}) {
      DiscreteOperatorSet ops = make_ops(ctx, n);
      CVec fn = node_samples(ops.grid, ctx.problem.rho, f);
      CVec fc(ops.nv());
      for (int i = 0; i < ops.nv(); ++i) fc[i] = f(ops.grid.cell_x[i]);
      CVec u = Eigen::PartialPivLU<CMat>(ops.TstarT()).solve(fn);
      CVec k = apply_inverse_via_kernel(bc, fc, ops.grid);
      err.push_back((u - k).cwiseAbs().maxCoeff());
    }
    double order = min_order(err, std::vector<double>(err.size(), 1e-13));
    if (smooth) rep.check("greens.kernel_order", "greens-kernel", -order, -1.9, "negated observed order");
    else rep.report_only("greens.kernel_order", "greens-kernel", order, "non-smooth coefficients");
  });
}

void trace_suite(const CommandContext& ctx, VerificationReport& rep) {
  DiscreteOperatorSet ops = make_ops(ctx, ctx.cfg.n_grid);
  if (!invertible_H1(ops.bc)) {
    rep.report_only("trace.skipped", "trace-identity", 0.0, "T*T has a kernel for " + ops.bc.name());
    return;
  }
  Spectrum spec = eigen_dirac(ops, EigenOptions{false});
  const int n_max = ctx.cfg.n_max;
  guarded(rep, "trace.ledger", "trace-identity", [&] {
    TraceLedger L = build_trace_ledger(ops, spec, ctx.problem.alpha, n_max);
    write_file(ctx.out_dir, "ledger.json", [&](std::ostream& os) { write_trace_ledger_json(os, L); });
    for (int n = 0; n <= n_max; ++n) {
      const TraceDiscrepancy& d = L.discrepancies[n];
      std::string tag = std::to_string(2 * n);
      double even = d.even / std::max(d.scale_even, 1e-300);
      double odd = d.odd / std::max(d.scale_odd, 1e-300);
      if (n <= 1) rep.check("trace.even_m" + tag, "trace-identity", even, n == 0 ? 1e-8 : 1e-6, "relative to sum'|lambda|^-(m+1)");
      else rep.report_only("trace.even_m" + tag, "trace-identity", even);
      std::string otag = "trace.odd_m" + std::to_string(2 * n + 1);
      if (ops.bc.is_real() && n <= 2) rep.check(otag, "odd-trace", odd, 1e-8);
      else rep.report_only(otag, "odd-trace", odd);
    }
    for (std::size_t n = 0; n < L.t_closed.size(); ++n) {
      double scale = std::max(L.discrepancies[n].scale_even, 1e-300);
      rep.check("trace.closed_vs_series_n" + std::to_string(n), "trace-coefficient",
                std::abs(L.t_closed[n] - L.t[n]) / scale, 1e-10);
    }
    rep.report_only("trace.t0_discrete", "t0-continuum", L.t[0]);
    rep.report_only("trace.t0_continuum", "t0-continuum", L.t0_continuum);
  });
  guarded(rep, "trace.series_fit", "series-interchange", [&] {
    SeriesFit fit = series_fit(spec, 3);
    rep.check("trace.series_fit", "series-interchange", fit.max_defect, 1e-6);
  });
  guarded(rep, "trace.livsic", "livsic", [&] {
    LivsicReport lv = livsic_check(ops, ctx.cfg.zeta);
    rep.check("trace.livsic_equality", "livsic", std::abs(lv.gap), 1e-9);
    rep.check_bool("trace.livsic_inequality", "livsic", lv.inequality, lv.gap, -1e-9,
                   "tr Im R minus sum Im lambda(R)");
    rep.check("trace.livsic_im_psd", "livsic", -lv.min_eig_im, 1e-12, "negated smallest eigenvalue of Im R");
  });
  double rho_c = 0.0;
  if (ops.bc.kind == BoundaryCondition::Kind::Min && is_constant(ctx.problem.rho, &rho_c) &&
      rho_c == 1.0 && is_smooth(ctx.problem.alpha)) {
    guarded(rep, "trace.regularized_sum", "regularized-sum", [&] {
      RegularizedSum rs = regularized_sum_check(spec, ctx.problem.alpha);
      rep.report_only("trace.regularized_sum", "regularized-sum",
                      std::abs(rs.partial_sums.back() - rs.target),
                      "pairs=" + std::to_string(rs.pairs));
    });
  }
}

void resolvent_suite(const CommandContext& ctx, VerificationReport& rep) {
  DiscreteOperatorSet ops = make_ops(ctx, ctx.cfg.n_grid);
  const double zeta = ctx.cfg.zeta;
  guarded(rep, "resolvent.trace_expansion", "resolvent-trace", [&] {
    ResolventTrace rt = resolvent_trace_expansion(zeta, ops);
    rep.check("resolvent.trace_agreement", "resolvent-trace", rt.agreement, 1e-10);
    rep.check("resolvent.trace_parity", "resolvent-parity", rt.parity_defect, 1e-10);
  });
  guarded(rep, "resolvent.dirac_block", "block-resolvent", [&] {
    BlockResolvent r = resolvent_dirac(cplx(0.3, 0.1), ops);
    rep.check("resolvent.dirac_block", "block-resolvent", r.relative_error, 1e-11);
  });
  guarded(rep, "resolvent.perturbed_block", "perturbed-resolvent", [&] {
    BlockResolvent r = resolvent_perturbed(cplx(0.2, 0.0), ops);
    rep.check("resolvent.perturbed_block", "perturbed-resolvent", r.relative_error, 1e-11);
  });
  guarded(rep, "resolvent.large_zeta", "block-resolvent", [&] {
    cplx z(0.0, 1e3);
    BlockResolvent r = resolvent_dirac(z, ops);
    double d1 = (r.R11 + CMat::Identity(ops.nu(), ops.nu()) / z).norm() / (r.R11.norm());
    double d2 = (r.R22 + CMat::Identity(ops.nv(), ops.nv()) / z).norm() / (r.R22.norm());
    rep.report_only("resolvent.large_zeta", "block-resolvent", std::max(d1, d2),
                    "diagonal blocks vs -1/zeta at |zeta| = 1e3");
  });
  if (invertible_H1(ops.bc)) {
    guarded(rep, "resolvent.series", "resolvent-trace", [&] {
      BlockResolvent r = resolvent_perturbed(cplx(zeta, 0.0), ops);
      double value = r.assembled().trace().imag();
      std::vector<double> t = series_coefficients(ops, 15);
      double series = 0.0;
      for (std::size_t m = 0; m < t.size(); ++m) series += t[m] * std::pow(zeta, static_cast<int>(m));
      rep.check("resolvent.series", "resolvent-trace", std::abs(value - series) / std::max(1.0, std::abs(value)),
                1e-8, "block resolvent trace vs truncated series");
    });
  }
}

void susy_suite(const CommandContext& ctx, VerificationReport& rep) {
  DiscreteOperatorSet ops = make_ops(ctx, ctx.cfg.n_grid);
  PolarParts parts = polar_decompose(ops);
  CMat M = ops.M();
  rep.check("susy.polar_reconstruction", "polar-decomposition",
            (M - parts.Vf * parts.absMf).norm() / M.norm(), 1e-12);
  rep.check("susy.polar_intertwining", "polar-decomposition",
            polar_intertwining_defect(parts, ops, [](double x) { return std::exp(-0.1 * x); }), 1e-10);
  IsospectralReport iso = check_isospectral(ops);
  rep.check("susy.isospectral", "isospectral", iso.defect, 1e-10);
  rep.check_bool("susy.zero_counts", "isospectral", iso.counts_match_kernels, iso.zeros_H1 + iso.zeros_H2,
                 0.0, "zero counts of T*T and TT* vs kernel census");
  double iw = 0.0;
  iw = std::max(iw, intertwining_defect(ops, [](double x) { return x; }));
  iw = std::max(iw, intertwining_defect(ops, [](double x) { return x * x; }));
  iw = std::max(iw, intertwining_defect(ops, [](double x) { return std::exp(-x); }));
  rep.check("susy.intertwining", "intertwining", iw, 1e-10);
  rep.check("susy.resolvent_identity", "intertwining", resolvent_identity_defect(-1.0, ops), 1e-10);

  guarded(rep, "susy.partner_vectors", "susy-partner", [&] {
    Spectrum h1 = eigen_selfadjoint(ops);
    double worst = 0.0, worst_dirac = 0.0;
    int used = 0;
    for (std::size_t k = 0; k < h1.size() && used < 5; ++k) {
      if (h1.zero_flags[k]) continue;
      double l2 = h1.eigenvalues[k].real();
      CVec f = h1.vectors.col(static_cast<Eigen::Index>(k));
      refine_selfadjoint_pair(ops, f, l2);
      VectorCheck a = susy_partner_eigvec(f, l2, ops);
      CVec g0 = a.vector;
      double m2 = l2;
      refine_partner_pair(ops, g0, m2);
      VectorCheck b = susy_partner_eigvec_reverse(g0, m2, ops);
      VectorCheck d = dirac_from_h1(f, std::sqrt(l2), ops);
      CVec g = a.vector / std::sqrt(inner_v(ops, a.vector, a.vector).real());
      VectorCheck e = dirac_from_h2(g, std::sqrt(l2), ops);
      VectorCheck m = dirac_from_h1(f, -std::sqrt(l2), ops);
      worst = std::max({worst, a.residual, b.residual});
      worst_dirac = std::max({worst_dirac, d.residual, e.residual, m.residual});
      ++used;
    }
    rep.check("susy.partner_vectors", "susy-partner", worst, 1e-8);
    rep.check("susy.dirac_vectors", "susy-partner", worst_dirac, 1e-8);
  });

  UnitaryReport u = diagonalizing_unitary(parts, ops);
  rep.check("susy.unitary_off_block", "diagonalizing-unitary", u.off_block, 1e-9);
  rep.check("susy.unitary_diagonal", "diagonalizing-unitary", u.diag_defect, 1e-9);
  rep.check("susy.unitary_isometry", "diagonalizing-unitary", u.unitarity, 1e-10);
  rep.check("susy.unitary_spectra", "diagonalizing-unitary", u.spectrum_defect, 1e-9);

  guarded(rep, "susy.equivalence", "generator-equivalence", [&] {
    EquivalenceReport eq = check_generator_equivalence(ops);
    if (eq.in_hypothesis) {
      rep.check("susy.equivalence_intertwining", "generator-equivalence", eq.intertwining, 1e-10);
      rep.check("susy.equivalence_spectra", "generator-equivalence", eq.spectrum_distance, 1e-8);
    } else {
      rep.report_only("susy.equivalence_spectra", "generator-equivalence", eq.spectrum_distance,
                      "outside hypothesis: T*T singular");
    }
    rep.check("susy.energy_isometry", "generator-equivalence", eq.isometry, 1e-12);
  });

  guarded(rep, "susy.eigenvector_maps", "eigenvector-maps", [&] {
    Spectrum g = eigen_generator(ops, EigenOptions{true});
    double worst = 0.0, worst_pencil = 0.0, worst_back = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.zero_flags[k]) continue;
      EigenPair p = generator_pair(g, static_cast<int>(k), ops);
      EigenPair d = map_generator_to_dirac(p, ops);
      EigenPair back = map_dirac_to_generator(d, ops);
      worst = std::max(worst, d.residual);
      worst_back = std::max(worst_back, back.residual);
      worst_pencil = std::max(worst_pencil, pencil_residual(p.lambda, p.vector.head(ops.nu()), ops) /
                                                 (g.op_norm * g.op_norm));
    }
    rep.check("susy.map_generator_to_dirac", "eigenvector-maps", worst, 1e-7);
    rep.check("susy.map_dirac_to_generator", "eigenvector-maps", worst_back, 1e-7);
    rep.check("susy.pencil_residual", "pencil-residual", worst_pencil, 1e-7,
              "relative to the squared operator norm");
  });

  FactorizationReport fr = verify_factorization_identity(cplx(0.7, 0.3), ops);
  rep.check("susy.factorization", "pencil-factorization",
            std::max({fr.identity_residual, fr.e_inverse_residual, fr.f_inverse_residual}), 1e-12);

  double rho_c = 0.0;
  guarded(rep, "susy.trace_ideal", "trace-ideal", [&] {
    double slope = trace_ideal_decay_exponent(ops);
    if (is_constant(ctx.problem.rho, &rho_c) && invertible_H1(ops.bc))
      rep.check("susy.trace_ideal", "trace-ideal", slope, -1.8, "fitted decay exponent");
    else
      rep.report_only("susy.trace_ideal", "trace-ideal", slope);
  });
}

void asymptotics_suite(const CommandContext& ctx, VerificationReport& rep) {
  DiscreteOperatorSet ops = make_ops(ctx, ctx.cfg.n_grid);
  Spectrum spec = eigen_dirac(ops, EigenOptions{false});
  guarded(rep, "asymptotics.slope", "branch-asymptotics", [&] {
    AsymptoticFit fit = fit_asymptotics(spec, ctx.problem.rho, FitWindow{ctx.cfg.fit_lo, ctx.cfg.fit_hi});
    write_file(ctx.out_dir, "slope.csv", [&](std::ostream& os) { write_slope(os, fit); });
    rep.check("asymptotics.slope", "branch-asymptotics", fit.relative_deviation, 0.02);
    rep.report_only("asymptotics.slope_minus", "branch-asymptotics",
                    std::abs(fit.slope_minus - fit.target) / fit.target);
  });
  double rho_c = 0.0, a = 0.0;
  if (ops.bc.kind == BoundaryCondition::Kind::Min && is_constant(ctx.problem.rho, &rho_c) &&
      rho_c == 1.0 && is_constant(ctx.problem.alpha, &a) && a >= 0.0) {
    guarded(rep, "asymptotics.closed_form", "constant-damping", [&] {
      std::vector<cplx> exact = closed_form_constant_damping(a, 10);
      std::vector<cplx> got;
      for (std::size_t i = 0; i < spec.size() && got.size() < exact.size(); ++i)
        if (!spec.zero_flags[i]) got.push_back(spec.eigenvalues[i]);
      double worst = 0.0;
      for (cplx e : exact) {
        double best = kInf;
        for (cplx g : got) best = std::min(best, std::abs(g - e));
        worst = std::max(worst, best / std::abs(e));
      }
      if (ctx.cfg.n_grid >= 512) rep.check("asymptotics.closed_form", "constant-damping", worst, 1e-3);
      else rep.report_only("asymptotics.closed_form", "constant-damping", worst, "hard gate at n >= 512");
    });
  }
}

void riesz_suite(const CommandContext& ctx, VerificationReport& rep) {
  DiscreteOperatorSet ops = make_ops(ctx, ctx.cfg.n_grid);
  Spectrum spec = eigen_dirac(ops, EigenOptions{true});
  ClusterRule rule;
  rule.fraction = ctx.cfg.cluster_fraction;
  double total = 0.0;
  {
    const int m = 4096;
    for (int i = 0; i < m; ++i) total += sample(ctx.problem.rho, (i + 0.5) / m) / m;
  }
  rule.spacing = std::numbers::pi / total;
  std::vector<RieszCluster> clusters = cluster_eigenvalues(spec, rule);
  compute_projections(clusters, ops);
  write_file(ctx.out_dir, "clusters.csv", [&](std::ostream& os) { write_cluster_csv(os, clusters); });
  bool converged = std::all_of(clusters.begin(), clusters.end(), [](const RieszCluster& c) { return c.converged; });
  rep.check_bool("riesz.quadrature_converged", "riesz-projection", converged,
                 static_cast<double>(clusters.size()), 0.0);
  guarded(rep, "riesz.resolution", "riesz-resolution", [&] {
    ResolutionReport r = verify_resolution_of_identity(clusters, spec, ops);
    rep.check("riesz.idempotency", "riesz-projection", r.max_idempotency, 1e-8);
    rep.check("riesz.resolution_of_identity", "riesz-resolution", r.identity_defect, 1e-6);
    rep.check("riesz.cross_products", "riesz-resolution", r.max_cross, 1e-7);
    rep.check("riesz.trace_integrality", "riesz-projection", r.max_trace_integrality, 1e-6);
    rep.check("riesz.invariant_subspaces", "riesz-projection", r.max_subspace_residual, 1e-6);
    rep.check_bool("riesz.ranks", "algebraic-multiplicity", r.ranks_match_members, r.rank_total,
                   static_cast<double>(spec.size()));
  });
  guarded(rep, "riesz.multiplicity", "algebraic-multiplicity", [&] {
    cplx l0 = first_eigenvalue(spec);
    RVec sw = ops.frame_weights().cwiseSqrt();
    CMat S = ops.dirac_frame(true);
    Multiplicity m = multiplicity(l0, S);
    rep.check_bool("riesz.multiplicity", "algebraic-multiplicity", m.geometric <= m.algebraic,
                   m.algebraic, m.geometric, "geometric <= algebraic");
  });
  rep.report_only("riesz.cluster_count", "riesz-clusters", static_cast<double>(clusters.size()));
}

void sweep_suite(const CommandContext& ctx, VerificationReport& rep) {
  // Kernel census: expected (ker T, ker T*) per family.
  struct Census {
    BoundaryCondition bc;
    int ker_T, ker_Tstar;
  };
  const std::vector<Census> census{{BoundaryCondition::max(), 1, 0},
                                   {BoundaryCondition::min(), 0, 1},
                                   {BoundaryCondition::zero0(), 0, 0},
                                   {BoundaryCondition::zero1(), 0, 0},
                                   {BoundaryCondition::quasi({1.0, 0.0}), 1, 1},
                                   {BoundaryCondition::quasi({0.0, 1.0}), 0, 0}};
  int mismatches = 0, cases = 0;
  for (const Census& c : census)
    for (int n : {8, 32, 128}) {
      DiscreteOperatorSet ops = assemble(n, ctx.problem.rho, ctx.problem.alpha, c.bc);
      KernelDims kd = kernel_dimensions(ops);
      ++cases;
      if (kd.ker_T != c.ker_T || kd.ker_Tstar != c.ker_Tstar || kd.ker_D != c.ker_T + c.ker_Tstar ||
          kd.ambiguous)
        ++mismatches;
    }
  rep.check("sweep.kernel_census", "kernel-census", mismatches, 0.0,
            std::to_string(cases) + " cases");

  const std::vector<BoundaryCondition> bcs{BoundaryCondition::min(), BoundaryCondition::zero0(),
                                           BoundaryCondition::zero1(),
                                           BoundaryCondition::quasi({0.0, 1.0})};
  for (const BoundaryCondition& bc : bcs) {
    std::string tag = bc.name();
    guarded(rep, "sweep.random_trace." + tag, "trace-identity", [&] {
      double e0 = 0.0, e1 = 0.0, e2 = 0.0, paths = 0.0, liv = 0.0;
      bool ineq = true;
      for (std::uint64_t seed : ctx.cfg.seeds) {
        auto [rho, alpha] = random_coefficients(seed);
        DiscreteOperatorSet ops = assemble(64, rho, alpha, bc);
        Spectrum spec = eigen_dirac(ops, EigenOptions{false});
        double t0 = trace_coefficient_closed(0, ops);
        e0 = std::max(e0, std::abs(eigen_sum(0, spec) + t0) / std::abs(t0));
        e1 = std::max(e1, std::abs(eigen_sum(1, spec)) / eigen_sum_scale(1, spec));
        double t2 = trace_coefficient(1, ops);
        e2 = std::max(e2, std::abs(eigen_sum(2, spec) + t2) / eigen_sum_scale(2, spec));
        paths = std::max(paths, std::abs(trace_coefficient_closed(1, ops) - t2) / eigen_sum_scale(2, spec));
        LivsicReport lv = livsic_check(ops, 0.1);
        liv = std::max(liv, std::abs(lv.gap));
        ineq = ineq && lv.inequality;
      }
      rep.check("sweep.trace_m0." + tag, "trace-identity", e0, 1e-8, "relative to |tr(C K)|");
      if (bc.is_real()) rep.check("sweep.trace_m1." + tag, "odd-trace", e1, 1e-8);
      else rep.report_only("sweep.trace_m1." + tag, "odd-trace", e1);
      rep.check("sweep.trace_m2." + tag, "trace-coefficient", e2, 1e-6);
      rep.check("sweep.t2_paths." + tag, "trace-coefficient", paths, 1e-10);
      rep.check("sweep.livsic." + tag, "livsic", liv, 1e-9);
      rep.check_bool("sweep.livsic_inequality." + tag, "livsic", ineq, liv, 0.0);
    });
  }
}

int run_command(const std::string& cmd, const RunConfig& cfg, VerificationReport& report) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), cmd) == names.end())
    throw ConfigError("command", "unknown command '" + cmd + "'");
  validate_config(cfg);
  CommandContext ctx{cfg, resolve_problem(cfg), cfg.out_dir};

  report.meta("command", cmd);
  report.meta("n_grid", std::to_string(cfg.n_grid));
  report.meta("bc", ctx.problem.bc.name());
  report.meta("rho_hash", text_hash(cfg.rho));
  report.meta("alpha_hash", text_hash(cfg.alpha));
  if (cfg.speed) report.meta("speed_hash", text_hash(*cfg.speed));

  auto run = [&](const std::string& name, void (*suite)(const CommandContext&, VerificationReport&)) {
    guarded(report, name, "command", [&] { suite(ctx, report); });
  };
  if (cmd == "spectrum") run(cmd, spectrum_suite);
  else if (cmd == "greens") run(cmd, greens_suite);
  else if (cmd == "trace") run(cmd, trace_suite);
  else if (cmd == "resolvent-check") run(cmd, resolvent_suite);
  else if (cmd == "susy-check") run(cmd, susy_suite);
  else if (cmd == "asymptotics") run(cmd, asymptotics_suite);
  else if (cmd == "riesz") run(cmd, riesz_suite);
  else {
    run("spectrum", spectrum_suite);
    run("greens", greens_suite);
    run("trace", trace_suite);
    run("resolvent-check", resolvent_suite);
    run("susy-check", susy_suite);
    run("riesz", riesz_suite);
    run("sweep", sweep_suite);
    if (!cfg.quick) {
      RunConfig big = cfg;
      big.n_grid = 2048;
      for (const char* rho : {"const 1", "const 2", "poly 1 1"}) {
        big.rho = rho;
        CommandContext c2{big, resolve_problem(big), ""};
        VerificationReport sub;
        guarded(sub, "asymptotics", "command", [&] { asymptotics_suite(c2, sub); });
        for (Record& r : sub.records) r.name += std::string(" [rho=") + rho + ", n=2048]";
        report.append(sub);
      }
    } else {
      run("asymptotics", asymptotics_suite);
    }
  }

  write_file(cfg.out_dir, "config.json", [&](std::ostream& os) { os << config_to_json(cfg) << '\n'; });
  write_file(cfg.out_dir, "report.json", [&](std::ostream& os) { write_report_json(os, report); });
  write_file(cfg.out_dir, "report.csv", [&](std::ostream& os) { write_report_csv(os, report); });
  return report.any_failure() ? 1 : 0;
}

} // namespace dampstring
