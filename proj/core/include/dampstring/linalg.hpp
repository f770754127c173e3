#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dampstring/types.hpp"

namespace dampstring {

class EigensolverError : public std::runtime_error {
 public:
  EigensolverError(const std::string& what, int index = -1)
      : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

struct EigResult {
  CVec values;
  CMat vectors;  // right eigenvectors as columns, unit 2-norm; empty when not requested
};

// Dense general eigensolvers (LAPACK geev).
EigResult eig_complex(const CMat& A, bool vectors);
EigResult eig_real(const RMat& A, bool vectors);

RVec singular_values(const CMat& A);
RVec symmetric_tridiagonal_eigenvalues(const RVec& diag, const RVec& offdiag);

// Eigenvalues of the complex symmetric tridiagonal matrix with diagonal d and
// sub/super-diagonal e, by implicit QL with complex orthogonal rotations.
CVec complex_symmetric_tridiagonal_eigenvalues(CVec d, CVec e, int max_iter_per_value = 60);

// Banded storage of a dense matrix for repeated shifted solves (LAPACK gbsv).
class BandedMatrix {
 public:
  BandedMatrix(const CMat& A, double drop_tol = 0.0);
  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }
  // (A - z I)^{-1} B
  CMat shifted_solve(cplx z, const CMat& B) const;
  CMat shifted_inverse(cplx z) const { return shifted_solve(z, CMat::Identity(n_, n_)); }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  CMat ab_;  // (2 kl + ku + 1) x n
};

// 2-norm of a dense matrix.
double operator_norm(const CMat& A);

} // namespace dampstring
