#include "dampstring/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

namespace dampstring {

namespace {

lapack_complex_double* zptr(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

} // namespace

EigResult eig_complex(const CMat& A, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eig_complex: matrix not square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  EigResult r;
  r.values.resize(n);
  if (n == 0) return r;
  CMat a = A;
  CMat vr;
  if (vectors) vr.resize(n, n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, zptr(a.data()), n,
                                  zptr(r.values.data()), nullptr, 1,
                                  vectors ? zptr(vr.data()) : nullptr, vectors ? n : 1);
  if (info > 0) throw EigensolverError("zgeev failed to converge", static_cast<int>(info - 1));
  if (info < 0) throw EigensolverError("zgeev: invalid argument");
  if (vectors) r.vectors = std::move(vr);
  return r;
}

EigResult eig_real(const RMat& A, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eig_real: matrix not square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  EigResult r;
  r.values.resize(n);
  if (n == 0) return r;
  RMat a = A;
  RVec wr(n), wi(n);
  RMat vr;
  if (vectors) vr.resize(n, n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n,
                                  wr.data(), wi.data(), nullptr, 1,
                                  vectors ? vr.data() : nullptr, vectors ? n : 1);
  if (info > 0) throw EigensolverError("dgeev failed to converge", static_cast<int>(info - 1));
  if (info < 0) throw EigensolverError("dgeev: invalid argument");
  for (lapack_int k = 0; k < n; ++k) r.values[k] = cplx(wr[k], wi[k]);
  if (vectors) {
    r.vectors.resize(n, n);
    for (lapack_int k = 0; k < n; ++k) {
      if (wi[k] == 0.0) {
        r.vectors.col(k) = vr.col(k).cast<cplx>();
      } else if (wi[k] > 0.0 && k + 1 < n) {
        r.vectors.col(k) = vr.col(k).cast<cplx>() + I_unit * vr.col(k + 1).cast<cplx>();
        r.vectors.col(k + 1) = r.vectors.col(k).conjugate();
        ++k;
      }
    }
    for (lapack_int k = 0; k < n; ++k) r.vectors.col(k).normalize();
  }
  return r;
}

RVec singular_values(const CMat& A) {
  if (A.size() == 0) return RVec();
  Eigen::BDCSVD<CMat> svd(A);
  return svd.singularValues();
}

RVec symmetric_tridiagonal_eigenvalues(const RVec& diag, const RVec& offdiag) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  RVec d = diag;
  RVec e = offdiag;
  if (n == 0) return d;
  e.conservativeResize(std::max<lapack_int>(n - 1, 1));
  lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', n, d.data(), e.data(), nullptr, 1);
  if (info != 0) throw EigensolverError("dstev failed", static_cast<int>(info));
  return d;
}

BandedMatrix::BandedMatrix(const CMat& A, double drop_tol) : n_(static_cast<int>(A.rows())) {
  if (A.rows() != A.cols()) throw std::invalid_argument("BandedMatrix: matrix not square");
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      if (std::abs(A(i, j)) > drop_tol) {
        kl_ = std::max(kl_, i - j);
        ku_ = std::max(ku_, j - i);
      }
  ab_ = CMat::Zero(2 * kl_ + ku_ + 1, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
      ab_(kl_ + ku_ + i - j, j) = A(i, j);
}

CMat BandedMatrix::shifted_solve(cplx z, const CMat& B) const {
  CMat ab = ab_;
  for (int j = 0; j < n_; ++j) ab(kl_ + ku_, j) -= z;
  CMat x = B;
  std::vector<lapack_int> ipiv(n_);
  lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, static_cast<lapack_int>(x.cols()),
                                  zptr(ab.data()), static_cast<lapack_int>(ab.rows()), ipiv.data(),
                                  zptr(x.data()), n_);
  if (info != 0) throw std::runtime_error("zgbsv: singular shifted matrix");
  return x;
}

double operator_norm(const CMat& A) {
  if (A.size() == 0) return 0.0;
  return singular_values(A).maxCoeff();
}

} // namespace dampstring
