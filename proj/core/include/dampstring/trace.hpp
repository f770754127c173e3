#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dampstring/coefficients.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/spectral.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

class SingularOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// zeta^p coefficients of (T*T - zeta^2 - zeta i C)^{-1}, p = 0..p_max, from
// M_0 = K, M_1 = K iC M_0, M_p = K (M_{p-2} + iC M_{p-1}), K = (T*T)^{-1}.
std::vector<CMat> neumann_coefficients(const DiscreteOperatorSet& ops, int p_max);

// Im tr of the zeta^m coefficient of (2 zeta + iC)(T*T - zeta^2 - zeta iC)^{-1}.
// Even m = 2n gives t_{2n}; odd m should vanish.
std::vector<double> series_coefficients(const DiscreteOperatorSet& ops, int m_max);

double trace_coefficient(int n, const DiscreteOperatorSet& ops);
// t_0 = Re tr(C K) and t_2 = Re(3 tr(C K^2) - tr((C K)^3)); n in {0, 1}.
double trace_coefficient_closed(int n, const DiscreteOperatorSet& ops);

// S_m = sum' Im(lambda^{m+1}) / |lambda|^{2(m+1)} over nonzero eigenvalues.
double eigen_sum(int m, const Spectrum& spec);
// sum' |lambda|^{-(m+1)}, the natural size of S_m.
double eigen_sum_scale(int m, const Spectrum& spec);

struct TraceDiscrepancy {
  double even = 0.0;  // |S_{2n} + t_{2n}|
  double odd = 0.0;   // |S_{2n+1}|
  double scale_even = 0.0;
  double scale_odd = 0.0;
};

TraceDiscrepancy verify_trace_identity(int n, const DiscreteOperatorSet& ops, const Spectrum& spec);

struct ResolventTrace {
  double zeta = 0.0;
  double lhs = 0.0;        // Im tr (D + B - zeta)^{-1}
  double rhs = 0.0;        // Im tr (2 zeta + iC)(T*T - zeta^2 - zeta iC)^{-1}
  double lhs_minus = 0.0;  // same at -zeta
  double rhs_minus = 0.0;
  double parity_defect = 0.0;
  double agreement = 0.0;  // max |lhs - rhs| at +-zeta
};

ResolventTrace resolvent_trace_expansion(double zeta, const DiscreteOperatorSet& ops);
// Right side alone; usable at zeta = 0 where D + B may be singular.
double reduced_resolvent_trace(double zeta, const DiscreteOperatorSet& ops);

struct SeriesFit {
  std::vector<double> coefficients;  // fitted zeta^m coefficients
  std::vector<double> expected;      // -S_m
  double max_defect = 0.0;           // max over m of |fit - expected| / max(1, scale_m)
};

// Polynomial fit of zeta -> sum' Im (lambda - zeta)^{-1} on [-half_width, half_width].
SeriesFit series_fit(const Spectrum& spec, int m_max, double half_width = 0.05,
                     int degree = 10, int samples = 41);

struct RegularizedSum {
  std::vector<cplx> partial_sums;  // sum_{j <= J} [lambda_-,j + lambda_+,j - 2 c0]
  std::vector<cplx> terms;
  cplx target;
  cplx c0;
  int pairs = 0;
};

class PairingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pairs branch eigenvalues by rank of |Re|; purely imaginary eigenvalues are
// paired outermost-first by Im. j_cut <= 0 uses a quarter of the pairs.
RegularizedSum regularized_sum_check(const Spectrum& spec, const CoefficientSpec& alpha,
                                     int j_cut = 0);

struct LivsicReport {
  cplx shift;
  double eigen_sum = 0.0;   // sum Im lambda(R)
  double trace_im = 0.0;    // tr Im R
  double gap = 0.0;         // trace_im - eigen_sum
  double min_eig_im = 0.0;  // smallest eigenvalue of Im R
  bool inequality = false;
};

// R = (D + B - (z1 + zeta))^{-1}, z1 = i (||B|| + 1).
LivsicReport livsic_check(const DiscreteOperatorSet& ops, double zeta = 0.1);

struct TraceLedger {
  std::string bc;
  int n_grid = 0;
  int n_max = 0;
  std::vector<double> t;        // t_{2n}
  std::vector<double> t_closed; // closed forms for n = 0, 1
  double t0_continuum = 0.0;
  std::vector<double> lhs;      // S_m, m = 0..2 n_max + 1
  std::vector<TraceDiscrepancy> discrepancies;
  int zero_modes = 0;
};

TraceLedger build_trace_ledger(const DiscreteOperatorSet& ops, const Spectrum& spec,
                               const CoefficientSpec& alpha, int n_max);
void write_trace_ledger_json(std::ostream& os, const TraceLedger& ledger);

} // namespace dampstring
