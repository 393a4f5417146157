#include "cpl_slam/lanczos.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cpl_slam {

LanczosResult lanczos_largest(int dim, const HermitianOp &op,
                              const ComplexVector &guess,
                              const LanczosOptions &opts) {
  if (dim <= 0 || guess.size() != dim) {
    throw std::invalid_argument("lanczos_largest: bad dimension or seed");
  }
  LanczosResult result;
  if (dim == 1) {
    ComplexVector e = ComplexVector::Ones(1);
    result.eigenvalue = op(e)[0].real();
    result.eigenvector = e;
    result.iterations = 1;
    result.converged = true;
    return result;
  }

  const int max_iters = opts.max_iterations > 0 ? opts.max_iterations : 10 * dim;
  int krylov = opts.krylov_dim > 0
                   ? opts.krylov_dim
                   : std::min(dim, std::max(20, 2 * static_cast<int>(std::sqrt(
                                                     static_cast<double>(dim)))));
  krylov = std::min(krylov, dim);

  ComplexVector v = guess;
  Scalar vnorm = v.norm();
  if (!(vnorm > 0.0)) {
    throw std::invalid_argument("lanczos_largest: zero seed vector");
  }
  v /= vnorm;

  int total_iters = 0;
  while (true) {
    ComplexMatrix V(dim, krylov);
    RealVector alpha(krylov);
    RealVector beta(krylov);  // beta[j] links v_j and v_{j+1}
    int k = 0;
    ComplexVector w;
    for (; k < krylov && total_iters < max_iters; ++k, ++total_iters) {
      V.col(k) = v;
      w = op(v);
      alpha[k] = real_inner(v, w);
      w -= alpha[k] * v;
      if (k > 0) w -= beta[k - 1] * V.col(k - 1);
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        w -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * w).eval();
      }
      beta[k] = w.norm();
      if (beta[k] < 1e-14 * std::max(1.0, std::abs(alpha[k]))) {
        // Invariant subspace reached.
        ++k;
        ++total_iters;
        break;
      }
      v = w / beta[k];
    }
    if (k == 0) break;

    // Ritz decomposition of the k x k tridiagonal section.
    RealMatrix T = RealMatrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < k) {
        T(j, j + 1) = beta[j];
        T(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(T);
    const int top = k - 1;  // eigenvalues ascend
    result.eigenvalue = eig.eigenvalues()[top];
    const RealVector s = eig.eigenvectors().col(top);
    result.eigenvector = V.leftCols(k) * s.cast<Complex>();
    result.eigenvector.normalize();
    result.iterations = total_iters;

    const Scalar resid = (op(result.eigenvector) -
                          result.eigenvalue * result.eigenvector)
                             .norm();
    if (resid <= opts.residual_tol) {
      result.converged = true;
      return result;
    }
    if (total_iters >= max_iters) {
      return result;  // not converged
    }
    // Restart from the current Ritz vector.
    v = result.eigenvector;
  }
  return result;
}

}  // namespace cpl_slam
