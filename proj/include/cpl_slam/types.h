#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cpl_slam {

using Scalar = double;
using Complex = std::complex<Scalar>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

using SparseReal = Eigen::SparseMatrix<Scalar>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

using RealTriplet = Eigen::Triplet<Scalar>;
using ComplexTriplet = Eigen::Triplet<Complex>;

// Real inner product <X, Y> = Re(trace(X^H Y)) under which all manifolds in
// this library are treated as Riemannian submanifolds of Euclidean space.
inline Scalar real_inner(const ComplexMatrix &X, const ComplexMatrix &Y) {
  return X.cwiseProduct(Y.conjugate()).sum().real();
}

inline Scalar real_inner(const ComplexVector &x, const ComplexVector &y) {
  return x.dot(y).real();
}

}  // namespace cpl_slam
