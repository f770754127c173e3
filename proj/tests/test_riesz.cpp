#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "dampstring/random_coefficients.hpp"
#include "dampstring/riesz.hpp"
#include "support.hpp"

using namespace dampstring;
using std::numbers::pi;
using test::ops_for;

namespace {

CMat frame_matrix(const DiscreteOperatorSet& ops) { return ops.dirac_frame(true); }

double nearest_other(const Spectrum& s, std::size_t k) {
  double d = 1e300;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != k) d = std::min(d, std::abs(s.eigenvalues[i] - s.eigenvalues[k]));
  return d;
}

std::vector<RieszCluster> resolved(const DiscreteOperatorSet& ops, const Spectrum& s, double fraction = 0.5) {
  ClusterRule rule;
  rule.fraction = fraction;
  rule.spacing = pi;
  std::vector<RieszCluster> c = cluster_eigenvalues(s, rule);
  compute_projections(c, ops);
  return c;
}

} // namespace

TEST(Contour, Geometry) {
  Contour c = Contour::circle(cplx(1.0, 1.0), 0.5);
  EXPECT_TRUE(c.encloses(cplx(1.2, 0.9)));
  EXPECT_FALSE(c.encloses(cplx(2.0, 1.0)));
  EXPECT_NEAR(c.distance(cplx(2.0, 1.0)), 0.5, 1e-15);
  Contour r = Contour::rectangle(cplx(0.0, 0.0), cplx(2.0, 1.0));
  EXPECT_TRUE(r.encloses(cplx(1.0, 0.5)));
  EXPECT_FALSE(r.encloses(cplx(3.0, 0.5)));
  EXPECT_NEAR(r.distance(cplx(1.0, 0.4)), 0.4, 1e-15);
  EXPECT_NEAR(r.distance(cplx(3.0, 2.0)), std::sqrt(2.0), 1e-15);
}

TEST(Projection, SingleSimpleEigenvalue) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero0());
  CMat A = frame_matrix(ops);
  Spectrum s = eigen_dirac(ops);
  for (std::size_t k : {0u, 5u, 11u}) {
    RieszResult r = riesz_projection(A, Contour::circle(s.eigenvalues[k], nearest_other(s, k) / 5));
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.P.trace().real(), 1.0, 1e-9);
    EXPECT_NEAR(r.P.trace().imag(), 0.0, 1e-9);
    EXPECT_LE((r.P * r.P - r.P).norm(), 1e-8);
  }
}

TEST(Projection, EnclosingEverythingGivesIdentity) {
  DiscreteOperatorSet ops = ops_for(12, BoundaryCondition::min());
  CMat A = frame_matrix(ops);
  double R = operator_norm(A) + 1.0;
  RieszResult r = riesz_projection(A, Contour::circle(cplx(0.0, 0.0), R));
  ASSERT_TRUE(r.converged);
  EXPECT_LE((r.P - CMat::Identity(A.rows(), A.cols())).norm(), 1e-9);
  RieszResult rr = riesz_projection(A, Contour::rectangle(cplx(-R, -R), cplx(R, R)));
  EXPECT_LE((rr.P - CMat::Identity(A.rows(), A.cols())).norm(), 1e-9);
}

TEST(Projection, TwoEnclosedEigenvaluesRankTwo) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::min(), 1.0, 0.0);
  Spectrum s = eigen_dirac(ops);
  // +-lambda_1 in one rectangle.
  double l1 = 1e300;
  for (const cplx& z : s.eigenvalues)
    if (z.real() > 1e-6) l1 = std::min(l1, z.real());
  RieszResult r = riesz_projection(frame_matrix(ops), Contour::rectangle(cplx(-l1 - 0.5, -0.5), cplx(l1 + 0.5, 0.5)));
  // The rectangle also holds the zero mode.
  RVec sv = singular_values(r.P);
  EXPECT_EQ((sv.array() > 0.5).count(), 3);
  EXPECT_NEAR(r.P.trace().real(), 3.0, 1e-9);
}

TEST(Projection, BandedMatchesDense) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero1());
  Spectrum s = eigen_dirac(ops);
  std::vector<int> p = band_ordering(ops);
  CMat A = frame_matrix(ops);
  CMat Ap(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) Ap(i, j) = A(p[i], p[j]);
  Contour c = Contour::circle(s.eigenvalues[3], nearest_other(s, 3) / 5);
  RieszResult dense = riesz_projection(A, c);
  RieszResult band = riesz_projection(BandedMatrix(Ap), c);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) EXPECT_LE(std::abs(band.P(i, j) - dense.P(p[i], p[j])), 1e-10);
}

TEST(Projection, ContourOnEigenvalueRejected) {
  DiscreteOperatorSet ops = ops_for(12, BoundaryCondition::zero0());
  Spectrum s = eigen_dirac(ops);
  cplx l = s.eigenvalues[0];
  EXPECT_THROW(riesz_projection(frame_matrix(ops), Contour::circle(l + 0.3, 0.3)), ContourError);
}

TEST(Multiplicity, SimpleEigenvalue) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero0());
  Spectrum s = eigen_dirac(ops);
  Multiplicity m = multiplicity(s.eigenvalues[2], frame_matrix(ops));
  EXPECT_EQ(m.geometric, 1);
  EXPECT_EQ(m.algebraic, 1);
}

TEST(Multiplicity, GeometricNeverExceedsAlgebraic) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto [rho, alpha] = random_coefficients(seed);
    DiscreteOperatorSet ops = assemble(16, rho, alpha, BoundaryCondition::quasi(cplx(0.0, 1.0)));
    Spectrum s = eigen_dirac(ops);
    for (std::size_t k = 0; k < s.size(); k += 4) {
      Multiplicity m = multiplicity(s.eigenvalues[k], frame_matrix(ops));
      EXPECT_LE(m.geometric, m.algebraic);
      EXPECT_GE(m.geometric, 1);
    }
  }
}

TEST(Multiplicity, CriticalDampingReportsProfile) {
  // a = 2 pi collides the j = 1 pair near -i pi; the discrete collision sits
  // close by, so only the singular-value profile is checked.
  DiscreteOperatorSet ops = ops_for(64, BoundaryCondition::min(), 1.0, 2 * pi);
  Multiplicity m = multiplicity(cplx(0.0, -pi), frame_matrix(ops), 0.5);
  EXPECT_EQ(m.algebraic, 2);
  EXPECT_LE(m.geometric, m.algebraic);
  EXPECT_GT(m.smallest_singular_values.size(), 0);
}

TEST(Clusters, UndampedAreSingletons) {
  DiscreteOperatorSet ops = ops_for(32, BoundaryCondition::min(), 1.0, 0.0);
  Spectrum s = eigen_dirac(ops, {false});
  ClusterRule rule;
  rule.spacing = pi;
  std::vector<RieszCluster> c = cluster_eigenvalues(s, rule);
  for (const RieszCluster& k : c) EXPECT_EQ(k.members.size(), 1u);
  EXPECT_EQ(c.size(), s.size());
}

TEST(Clusters, SubcriticalDampingSingletons) {
  DiscreteOperatorSet ops = ops_for(32, BoundaryCondition::min(), 1.0, 1.0);
  Spectrum s = eigen_dirac(ops, {false});
  ClusterRule rule;
  rule.spacing = pi;
  for (const RieszCluster& k : cluster_eigenvalues(s, rule)) EXPECT_EQ(k.members.size(), 1u);
}

TEST(Clusters, NearCriticalPairMerges) {
  // a slightly below 2 pi: the j = 1 pair sits 2 sqrt(pi^2 - a^2/4) apart.
  double a = 2 * pi - 0.02;
  DiscreteOperatorSet ops = ops_for(64, BoundaryCondition::min(), 1.0, a);
  Spectrum s = eigen_dirac(ops, {false});
  ClusterRule rule;
  rule.spacing = pi;
  int pairs = 0;
  for (const RieszCluster& k : cluster_eigenvalues(s, rule)) {
    if (k.members.size() != 2) continue;
    ++pairs;
    for (int i : k.members) EXPECT_NEAR(s.eigenvalues[i].imag(), -a / 2, 0.05);
  }
  EXPECT_EQ(pairs, 1);
}

TEST(Clusters, ContoursKeepGap) {
  DiscreteOperatorSet ops = ops_for(32, BoundaryCondition::zero0(), 1.0, 1.0);
  Spectrum s = eigen_dirac(ops, {false});
  ClusterRule rule;
  rule.spacing = pi;
  for (const RieszCluster& k : cluster_eigenvalues(s, rule))
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool member = std::find(k.members.begin(), k.members.end(), static_cast<int>(i)) != k.members.end();
      EXPECT_EQ(k.contour.encloses(s.eigenvalues[i]), member);
      if (!member) EXPECT_GE(k.contour.distance(s.eigenvalues[i]), k.gap_min * (1 - 1e-12));
    }
}

TEST(Resolution, DampedMin) {
  DiscreteOperatorSet ops = ops_for(64, BoundaryCondition::min());
  Spectrum s = eigen_dirac(ops);
  std::vector<RieszCluster> c = resolved(ops, s);
  ResolutionReport r = verify_resolution_of_identity(c, s, ops);
  EXPECT_LE(r.identity_defect, 1e-6);
  EXPECT_LE(r.max_cross, 1e-7);
  EXPECT_LE(r.max_idempotency, 1e-8);
  EXPECT_LE(r.max_trace_integrality, 1e-6);
  EXPECT_LE(r.max_subspace_residual, 1e-6);
  EXPECT_TRUE(r.ranks_match_members);
  EXPECT_EQ(r.rank_total, ops.dim());
  for (const RieszCluster& k : c) EXPECT_TRUE(k.converged);
}

TEST(Resolution, UndampedNormal) {
  DiscreteOperatorSet ops = ops_for(32, BoundaryCondition::zero1(), 1.0, 0.0);
  Spectrum s = eigen_dirac(ops);
  std::vector<RieszCluster> c = resolved(ops, s);
  EXPECT_LE(verify_resolution_of_identity(c, s, ops).identity_defect, 1e-8);
}

TEST(Resolution, QuasiRandomDamping) {
  auto [rho, alpha] = random_coefficients(5);
  DiscreteOperatorSet ops = assemble(32, constant(1.0, CoefficientKind::Density), alpha,
                                     BoundaryCondition::quasi(cplx(0.0, 1.0)));
  Spectrum s = eigen_dirac(ops);
  std::vector<RieszCluster> c = resolved(ops, s);
  ResolutionReport r = verify_resolution_of_identity(c, s, ops);
  EXPECT_LE(r.identity_defect, 1e-6);
  EXPECT_LE(r.max_cross, 1e-7);
}

TEST(Resolution, CoverageGapRejected) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero0());
  Spectrum s = eigen_dirac(ops);
  std::vector<RieszCluster> c = resolved(ops, s);
  c.pop_back();
  EXPECT_THROW(verify_resolution_of_identity(c, s, ops), CoverageError);
}

TEST(Resolution, ClusterCsvColumns) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero0());
  Spectrum s = eigen_dirac(ops);
  std::vector<RieszCluster> c = resolved(ops, s);
  std::ostringstream os;
  write_cluster_csv(os, c);
  std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "cluster_id,branch,member_count,center_re,center_im,rank,idempotency_defect");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(c.size()) + 1);
}
