#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace pdmm {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

}  // namespace pdmm
