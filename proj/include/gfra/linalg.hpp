#pragma once

#include <complex>

#include <Eigen/Dense>

namespace gfra {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

}  // namespace gfra
