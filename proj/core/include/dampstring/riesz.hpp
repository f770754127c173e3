#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "dampstring/discretization.hpp"
#include "dampstring/linalg.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

struct Contour {
  enum class Kind { Circle, Rectangle };
  Kind kind = Kind::Circle;
  cplx center;
  double radius = 0.0;
  cplx lo, hi;  // rectangle corners (min re, min im) and (max re, max im)

  static Contour circle(cplx c, double r);
  static Contour rectangle(cplx lo, cplx hi);
  bool encloses(cplx z) const;
  // Distance from z to the contour curve.
  double distance(cplx z) const;
};

class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RieszOptions {
  double tol = 1e-10;      // on successive node doublings, relative to max(1, ||P||_F)
  int initial_nodes = 16;  // circle: total nodes; rectangle: per side
  int max_nodes = 4096;
  // Eigenvalues that must stay off the contour; the dense overload computes
  // them when empty. Closer than min_distance throws ContourError.
  std::vector<cplx> spectrum;
  double min_distance = 1e-8;
};

struct RieszResult {
  CMat P;
  int nodes = 0;
  double delta = 0.0;
  bool converged = false;
};

// P = -(2 pi i)^{-1} \oint (A - zeta)^{-1} d zeta, trapezoid on circles and
// Gauss-Legendre per side on rectangles, doubling until converged. Throws
// ContourError for an eigenvalue on the contour or a non-finite quadrature.
RieszResult riesz_projection(const BandedMatrix& A, const Contour& contour,
                             const RieszOptions& opt = {});
RieszResult riesz_projection(const CMat& A, const Contour& contour, const RieszOptions& opt = {});

struct Multiplicity {
  int geometric = 0;
  int algebraic = 0;
  double radius = 0.0;
  RVec smallest_singular_values;  // of A - lambda0, ascending
};

class IsolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Radius <= 0 picks a fifth of the distance to the nearest eigenvalue outside
// a small neighbourhood of lambda0.
Multiplicity multiplicity(cplx lambda0, const CMat& A, double radius = 0.0);

struct ClusterRule {
  double fraction = 0.5;
  double spacing = 0.0;          // asymptotic spacing pi / \int rho; <= 0 disables
  bool local_spacing = true;     // also cap by the distance to the second-nearest eigenvalue
};

struct RieszCluster {
  std::vector<int> members;  // spectrum indices
  int branch = 0;            // sign of the mean real part; 0 for the zero-mode cluster
  bool zero_modes = false;
  Contour contour;
  double gap_min = 0.0;
  CMat projection;  // weighted frame, original index order
  int rank = 0;
  double trace = 0.0;
  double idempotency_defect = 0.0;
  int nodes = 0;
  bool converged = false;
};

// Single linkage: i ~ j when |lambda_i - lambda_j| < fraction * min(spacing,
// s_i, s_j), s the distance to the second-nearest eigenvalue. Zero modes form
// their own cluster. Contours grow to absorb eigenvalues closer than gap_min.
std::vector<RieszCluster> cluster_eigenvalues(const Spectrum& spec, const ClusterRule& rule);

// Fills projection, rank, trace and idempotency for every cluster.
void compute_projections(std::vector<RieszCluster>& clusters, const DiscreteOperatorSet& ops,
                         const RieszOptions& opt = {});

struct ResolutionReport {
  double identity_defect = 0.0;     // ||sum P - I|| (weighted operator norm)
  double max_cross = 0.0;           // max ||P_i P_j||, i != j, including the truncation bound
  double max_idempotency = 0.0;
  double max_trace_integrality = 0.0;
  double max_subspace_residual = 0.0;  // ||(I - P) v|| / ||v|| for enclosed eigenvectors
  int rank_total = 0;
  bool ranks_match_members = true;
};

class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ResolutionReport verify_resolution_of_identity(const std::vector<RieszCluster>& clusters,
                                               const Spectrum& spec,
                                               const DiscreteOperatorSet& ops);

void write_cluster_csv(std::ostream& os, const std::vector<RieszCluster>& clusters);

} // namespace dampstring
