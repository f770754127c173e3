#include <cmath>

#include <gtest/gtest.h>

#include "dampstring/random_coefficients.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/susy.hpp"
#include "support.hpp"

using namespace dampstring;
using test::ops_for;

namespace {

CMat dense_inverse(const CMat& A, cplx z) {
  return (A - z * CMat::Identity(A.rows(), A.cols())).inverse();
}

} // namespace

TEST(Polar, ReconstructsFrame) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(16, bc);
    PolarParts p = polar_decompose(ops);
    CMat M = ops.M();
    EXPECT_LE((M - p.Vf * p.absMf).norm() / M.norm(), 1e-12) << bc.name();
    // |M| is Hermitian positive semidefinite with |M|^2 = M* M.
    EXPECT_LE((p.absMf - p.absMf.adjoint()).norm(), 1e-12 * M.norm());
    EXPECT_LE((p.absMf * p.absMf - M.adjoint() * M).norm(), 1e-10 * M.squaredNorm());
    // V is a partial isometry.
    CMat VhV = p.Vf.adjoint() * p.Vf;
    EXPECT_LE((VhV * VhV - VhV).norm(), 1e-10) << bc.name();
  }
}

TEST(Polar, OriginalCoordinates) {
  auto [rho, alpha] = random_coefficients(6);
  DiscreteOperatorSet ops = assemble(16, rho, alpha, BoundaryCondition::zero0());
  PolarParts p = polar_decompose(ops.T, ops.wu, ops.wv);
  EXPECT_LE((ops.T - p.V * p.absT).norm() / ops.T.norm(), 1e-12);
}

TEST(Isospectral, NonzeroSpectraCoincide) {
  for (const auto& bc : test::kAllBcs) {
    IsospectralReport r = check_isospectral(ops_for(32, bc));
    EXPECT_LE(r.defect, 1e-10) << bc.name();
    EXPECT_TRUE(r.counts_match_kernels) << bc.name();
  }
  IsospectralReport min = check_isospectral(ops_for(32, BoundaryCondition::min()));
  EXPECT_EQ(min.zeros_H1, 0);
  EXPECT_EQ(min.zeros_H2, 1);
}

TEST(Sigma3, AnticommutesWithDirac) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(12, bc);
    CVec psi = test::random_vector(ops.dim(), 4);
    CMat D = ops.D();
    CVec lhs = sigma3(D * psi, ops.nu()) + D * sigma3(psi, ops.nu());
    EXPECT_LE(lhs.norm(), 1e-12 * D.norm() * psi.norm());
    EXPECT_LE((sigma3(sigma3(psi, ops.nu()), ops.nu()) - psi).norm(), 0.0);
  }
}

TEST(Partner, EigenvectorsMapBetweenPartners) {
  for (const auto& bc : {BoundaryCondition::min(), BoundaryCondition::zero0(), BoundaryCondition::zero1(),
                         BoundaryCondition::quasi(cplx(0.0, 1.0)), BoundaryCondition::quasi(cplx(0.5, 0.3))}) {
    DiscreteOperatorSet ops = ops_for(64, bc);
    Spectrum h = eigen_selfadjoint(ops);
    int used = 0;
    for (std::size_t k = 0; k < h.size() && used < 5; ++k) {
      if (h.zero_flags[k]) continue;
      CVec f = h.vectors.col(static_cast<Eigen::Index>(k));
      double mu = h.eigenvalues[k].real();
      refine_selfadjoint_pair(ops, f, mu);
      VectorCheck g = susy_partner_eigvec(f, mu, ops);
      EXPECT_LE(g.residual, 1e-8) << bc.name();
      CVec gv = g.vector;
      double m2 = mu;
      refine_partner_pair(ops, gv, m2);
      EXPECT_LE(susy_partner_eigvec_reverse(gv, m2, ops).residual, 1e-8) << bc.name();
      EXPECT_LE(dirac_from_h1(f, std::sqrt(mu), ops).residual, 1e-8);
      EXPECT_LE(dirac_from_h1(f, -std::sqrt(mu), ops).residual, 1e-8);
      EXPECT_LE(dirac_from_h2(gv / std::sqrt(inner_v(ops, gv, gv).real()), std::sqrt(m2), ops).residual, 1e-8);
      ++used;
    }
  }
}

TEST(Partner, RejectsZeroEigenvalue) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::max());
  CVec f = CVec::Ones(ops.nu());
  EXPECT_ANY_THROW(susy_partner_eigvec(f, 0.0, ops));
  EXPECT_ANY_THROW(dirac_from_h1(f, 0.0, ops));
}

TEST(Unitary, DiagonalizesDirac) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(16, bc);
    UnitaryReport u = diagonalizing_unitary(polar_decompose(ops), ops);
    EXPECT_LE(u.off_block, 1e-9) << bc.name();
    EXPECT_LE(u.diag_defect, 1e-9) << bc.name();
    EXPECT_LE(u.unitarity, 1e-10) << bc.name();
    EXPECT_LE(u.spectrum_defect, 1e-9) << bc.name();
  }
}

TEST(Intertwining, FunctionalCalculus) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(24, bc);
    EXPECT_LE(intertwining_defect(ops, [](double x) { return x; }), 1e-10) << bc.name();
    EXPECT_LE(intertwining_defect(ops, [](double x) { return std::exp(-x); }), 1e-10) << bc.name();
    PolarParts p = polar_decompose(ops);
    EXPECT_LE(polar_intertwining_defect(p, ops, [](double x) { return 1.0 / (1.0 + x); }), 1e-10) << bc.name();
    EXPECT_LE(resolvent_identity_defect(cplx(-1.0, 0.5), ops), 1e-10) << bc.name();
  }
}

TEST(Resolvent, DiracBlocksMatchDenseInverse) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(16, bc, 1.0, 0.0);
    cplx z(0.3, 0.1);
    BlockResolvent r = resolvent_dirac(z, ops);
    EXPECT_LE(r.relative_error, 1e-11) << bc.name();
    CMat ref = dense_inverse(ops.D(), z);
    EXPECT_LE((r.assembled() - ref).norm() / ref.norm(), 1e-11) << bc.name();
  }
}

TEST(Resolvent, PerturbedBlocksMatchDenseInverse) {
  for (const auto& bc : test::kAllBcs) {
    DiscreteOperatorSet ops = ops_for(16, bc, 1.0, 1.0);
    cplx z(0.2, 0.0);
    BlockResolvent r = resolvent_perturbed(z, ops);
    CMat ref = dense_inverse(ops.DB(), z);
    EXPECT_LE((r.assembled() - ref).norm() / ref.norm(), 1e-11) << bc.name();
    EXPECT_LE(r.relative_error, 1e-11);
  }
}

TEST(Resolvent, PerturbedReducesToDiracWithoutDamping) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::zero0(), 1.0, 0.0);
  cplx z(0.4, -0.2);
  BlockResolvent a = resolvent_dirac(z, ops);
  BlockResolvent b = resolvent_perturbed(z, ops);
  EXPECT_LE((a.R11 - b.R11).norm(), 1e-12 * a.R11.norm());
  EXPECT_LE((a.R12 - b.R12).norm(), 1e-12 * a.R12.norm());
  EXPECT_LE((a.R21 - b.R21).norm(), 1e-12 * a.R21.norm());
  EXPECT_LE((a.R22 - b.R22).norm(), 1e-12 * a.R22.norm());
}

TEST(Resolvent, LargeImaginaryZetaDiagonalBlocks) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::min(), 1.0, 0.0);
  cplx z(0.0, 1e3);
  BlockResolvent r = resolvent_dirac(z, ops);
  CMat I1 = CMat::Identity(ops.nu(), ops.nu()), I2 = CMat::Identity(ops.nv(), ops.nv());
  EXPECT_LE((r.R11 + I1 / z).norm() / (I1 / z).norm(), 0.01);
  EXPECT_LE((r.R22 + I2 / z).norm() / (I2 / z).norm(), 0.01);
}

TEST(Resolvent, RejectsSpectralPoint) {
  DiscreteOperatorSet ops = ops_for(16, BoundaryCondition::min(), 1.0, 0.0);
  EXPECT_THROW(resolvent_dirac(cplx(0.0, 0.0), ops), ResolventError);
}

TEST(Equivalence, GeneratorIntertwining) {
  for (const auto& bc : {BoundaryCondition::min(), BoundaryCondition::zero1(), BoundaryCondition::quasi(cplx(0.0, 1.0))}) {
    EquivalenceReport r = check_generator_equivalence(ops_for(24, bc, 1.0, 0.7));
    EXPECT_TRUE(r.in_hypothesis);
    EXPECT_LE(r.intertwining, 1e-10) << bc.name();
    EXPECT_LE(r.isometry, 1e-10) << bc.name();
    EXPECT_LE(r.spectrum_distance, 1e-8) << bc.name();
  }
  EXPECT_FALSE(check_generator_equivalence(ops_for(16, BoundaryCondition::quasi(1.0))).in_hypothesis);
}

TEST(TraceIdeal, DecayExponent) {
  double s = trace_ideal_decay_exponent(ops_for(256, BoundaryCondition::zero0()));
  EXPECT_LE(s, -1.8);
  EXPECT_GE(s, -2.2);
}
