#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dampstring/coefficients.hpp"
#include "dampstring/discretization.hpp"
#include "dampstring/types.hpp"

namespace dampstring {

enum class SpectrumSource { Dirac, Generator, SelfAdjoint };
enum class SpaceTag { NodeCell, NodeNode, Node };

struct Spectrum {
  std::vector<cplx> eigenvalues;
  std::vector<double> residuals;  // NaN when vectors were not computed
  std::vector<bool> zero_flags;
  std::vector<int> branch;        // +1, -1, or 0 (on the imaginary axis)
  int zero_modes = 0;
  SpectrumSource source = SpectrumSource::Dirac;
  double tol_zero = 0.0;
  double op_norm = 0.0;
  CMat vectors;  // columns in original (unweighted) coordinates; empty if not computed

  std::size_t size() const { return eigenvalues.size(); }
  bool has_vectors() const { return vectors.size() > 0; }
  std::vector<cplx> nonzero() const;
};

enum class EigenBackend { Auto, Dense, Tridiagonal };

struct EigenOptions {
  bool vectors = true;
  EigenBackend backend = EigenBackend::Auto;
};

// Spectrum of D + B via its weighted-frame similarity.
Spectrum eigen_dirac(const DiscreteOperatorSet& ops, const EigenOptions& opt = {});
// Spectrum of iG on node + node space.
Spectrum eigen_generator(const DiscreteOperatorSet& ops, const EigenOptions& opt = {});
// Spectrum of T*T (real, ascending).
Spectrum eigen_selfadjoint(const DiscreteOperatorSet& ops);

struct EigenPair {
  cplx lambda;
  CVec vector;
  SpaceTag tag = SpaceTag::NodeCell;
  double residual = 0.0;
};

// || (T*T - lambda i R - lambda^2) u ||_Wu / || u ||_Wu
double pencil_residual(cplx lambda, const CVec& u, const DiscreteOperatorSet& ops);

// Relative residuals: ||(A - lambda) x|| / (||A|| ||x||), in the weighted norm
// for D + B and in the energy norm ||Tu||^2 + ||v||^2 for iG.
double dirac_residual(cplx lambda, const CVec& psi, const DiscreteOperatorSet& ops);
double generator_residual(cplx lambda, const CVec& w, const DiscreteOperatorSet& ops);
double generator_energy_norm(const CVec& w, const DiscreteOperatorSet& ops);

EigenPair generator_pair(const Spectrum& spec, int index, const DiscreteOperatorSet& ops);
EigenPair dirac_pair(const Spectrum& spec, int index, const DiscreteOperatorSet& ops);

// (u, v) -> (v, -i T u)
EigenPair map_generator_to_dirac(const EigenPair& pair, const DiscreteOperatorSet& ops);
// (psi1, psi2) -> (i w, psi1) with T w = psi2 solved on ran(T)
EigenPair map_dirac_to_generator(const EigenPair& pair, const DiscreteOperatorSet& ops,
                                 double* range_residual = nullptr);

struct SymmetryReport {
  double distance = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
};

// {lambda} against {-conj(lambda)}, or against the companion spectrum of the
// conjugate boundary condition when one is supplied.
SymmetryReport check_symmetry(const Spectrum& spec, const Spectrum* companion = nullptr,
                              double tolerance = 1e-8);

struct StripReport {
  double max_abs_im = 0.0;
  double bound = 0.0;
  bool pass = false;
  double max_im = 0.0;     // largest Im lambda
  bool dissipative = false;
  bool one_sided = false;  // Im lambda <= slack when alpha >= 0
};

StripReport check_strip(const Spectrum& spec, const DiscreteOperatorSet& ops, double slack = 1e-10);

struct FitWindow {
  double lo = 1.0 / 32.0;
  double hi = 1.0 / 16.0;
};

struct AsymptoticFit {
  double slope = 0.0;
  double intercept = 0.0;
  double target = 0.0;
  double relative_deviation = 0.0;
  double slope_minus = 0.0;  // same fit on the Re < 0 branch, |Re|
  int branch_size = 0;
  std::vector<int> j;
  std::vector<double> re_lambda;
  std::vector<double> fit_value;
};

AsymptoticFit fit_asymptotics(const Spectrum& spec, const CoefficientSpec& rho,
                              const FitWindow& window = {});

// lambda_{-,j}, lambda_{+,j} for j = 1..j_max, interleaved.
std::vector<cplx> closed_form_constant_damping(double a, int j_max);

struct FactorizationReport {
  double identity_residual = 0.0;  // relative Frobenius residual of (L + I) F = E (iG - z)
  double e_inverse_residual = 0.0;
  double f_inverse_residual = 0.0;
};

FactorizationReport verify_factorization_identity(cplx z, const DiscreteOperatorSet& ops);

void write_spectrum_csv(std::ostream& os, const Spectrum& spec);

} // namespace dampstring
