#pragma once

#include <functional>

#include "dampstring/discretization.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

// Polar parts T = V |T| in original coordinates, plus the weighted-frame
// versions (M = Wv^{1/2} T Wu^{-1/2}) used by the checks.
struct PolarParts {
  CMat V;         // cells x nodes
  CMat absT;      // nodes x nodes
  CMat absTstar;  // cells x cells
  CMat Vf, absMf, absMstarf;  // weighted frame
  double tol_zero = 0.0;
  int rank = 0;
};

PolarParts polar_decompose(const CMat& T, const RVec& wu, const RVec& wv);
PolarParts polar_decompose(const DiscreteOperatorSet& ops);

struct IsospectralReport {
  double defect = 0.0;  // relative distance of nonzero spectra
  int zeros_H1 = 0;     // zero eigenvalues of T*T
  int zeros_H2 = 0;     // zero eigenvalues of TT*
  bool counts_match_kernels = false;
};

IsospectralReport check_isospectral(const DiscreteOperatorSet& ops);

struct VectorCheck {
  CVec vector;
  double residual = 0.0;
};

// One inverse-iteration step and a Rayleigh quotient on T*T; removes the
// high-frequency error a dense eigensolver leaves in low eigenvectors.
void refine_selfadjoint_pair(const DiscreteOperatorSet& ops, CVec& f, double& mu);
// The same on TT* in the v-space weights.
void refine_partner_pair(const DiscreteOperatorSet& ops, CVec& g, double& mu);

// T f for an eigenpair (f, lambda2) of T*T; residual as a TT* eigenpair.
VectorCheck susy_partner_eigvec(const CVec& f, double lambda2, const DiscreteOperatorSet& ops);
// T* g for an eigenpair (g, mu2) of TT*; residual as a T*T eigenpair.
VectorCheck susy_partner_eigvec_reverse(const CVec& g, double mu2, const DiscreteOperatorSet& ops);

// (f, T f / lambda), a D-eigenvector for lambda when T*T f = lambda^2 f.
VectorCheck dirac_from_h1(const CVec& f, double lambda, const DiscreteOperatorSet& ops);
// (T* g / mu, g) from TT* g = mu^2 g.
VectorCheck dirac_from_h2(const CVec& g, double mu, const DiscreteOperatorSet& ops);
// sigma_3 = diag(I, -I) applied to a node+cell vector.
CVec sigma3(const CVec& psi, int nu);

struct UnitaryReport {
  CMat U;                     // frame
  double off_block = 0.0;     // off-diagonal block norm of U Q U* on (ker D)^perp
  double diag_defect = 0.0;   // || U Q U* - diag(|M|, -|M*|) || on (ker D)^perp
  double unitarity = 0.0;     // || P (U* U - I) P ||
  double spectrum_defect = 0.0;  // blocks' spectra vs +-sqrt(sigma(T*T)) \ {0}
};

UnitaryReport diagonalizing_unitary(const PolarParts& parts, const DiscreteOperatorSet& ops);

struct BlockResolvent {
  cplx zeta;
  CMat R11, R12, R21, R22;
  CMat assembled() const;
  double relative_error = 0.0;  // vs direct dense inverse
  double condition = 0.0;       // of [I + zeta V (H1 - zeta^2)^{-1}] when perturbed
};

class ResolventError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BlockResolvent resolvent_dirac(cplx zeta, const DiscreteOperatorSet& ops);
BlockResolvent resolvent_perturbed(cplx zeta, const DiscreteOperatorSet& ops);

// T f(H1) = f(H2) T with f applied through the Hermitian frame.
double intertwining_defect(const DiscreteOperatorSet& ops, const std::function<double(double)>& f);
// V f(H1) = f(H2) V.
double polar_intertwining_defect(const PolarParts& parts, const DiscreteOperatorSet& ops,
                                 const std::function<double(double)>& f);
// I + z (H2 - z)^{-1} = T (H1 - z)^{-1} T*
double resolvent_identity_defect(cplx z, const DiscreteOperatorSet& ops);

struct EquivalenceReport {
  double intertwining = 0.0;  // ||(D+B)(I + P_ran T) U - U iG|| relative
  double isometry = 0.0;      // energy norm vs weighted norm under U
  double spectrum_distance = 0.0;
  bool in_hypothesis = true;  // false when T*T is singular
};

EquivalenceReport check_generator_equivalence(const DiscreteOperatorSet& ops);

// Least-squares slope of log eig_j((T*T + I)^{-1}) against log j.
double trace_ideal_decay_exponent(const DiscreteOperatorSet& ops, int j_lo = 4, int j_hi = -1);

} // namespace dampstring
