#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dampstring {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

} // namespace dampstring
