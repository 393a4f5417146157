#include "cpl_slam/oblique.h"

#include <cmath>
#include <stdexcept>

namespace cpl_slam {

RealVector row_norms_squared(const ComplexMatrix &Y) {
  return Y.cwiseAbs2().rowwise().sum();
}

bool is_oblique_point(const ComplexMatrix &Y, Scalar tol) {
  return ((row_norms_squared(Y).array() - 1.0).abs() <= tol).all();
}

ComplexMatrix normalize_rows(const ComplexMatrix &Y) {
  const RealVector norms = row_norms_squared(Y).cwiseSqrt();
  if ((norms.array() == 0.0).any()) {
    throw std::runtime_error("normalize_rows: zero row cannot be normalized");
  }
  return norms.cwiseInverse().cast<Complex>().asDiagonal() * Y;
}

RealVector radial_components(const ComplexMatrix &Y, const ComplexMatrix &U) {
  // Re{ddiag(U Y^H)}_ii = Re sum_k U_ik conj(Y_ik)
  return (U.array() * Y.array().conjugate()).real().rowwise().sum();
}

ComplexMatrix project_tangent(const ComplexMatrix &Y, const ComplexMatrix &U) {
  if (Y.rows() != U.rows() || Y.cols() != U.cols()) {
    throw std::invalid_argument("project_tangent: shape mismatch");
  }
  const RealVector radial = radial_components(Y, U);
  return U - radial.cast<Complex>().asDiagonal() * Y;
}

bool is_tangent(const ComplexMatrix &Y, const ComplexMatrix &U, Scalar tol) {
  return radial_components(Y, U).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix retract(const ComplexMatrix &Y, const ComplexMatrix &U) {
  ComplexMatrix sum = Y + U;
  const RealVector norms = row_norms_squared(sum).cwiseSqrt();
  if ((norms.array() == 0.0).any()) {
    throw std::runtime_error("retract: a row of Y + U vanished");
  }
  return norms.cwiseInverse().cast<Complex>().asDiagonal() * sum;
}

ComplexMatrix random_oblique(int n, int r, Rng &rng) {
  ComplexMatrix Y(n, r);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < r; ++k) {
      Y(i, k) = Complex(rng.normal(), rng.normal());
    }
  }
  return normalize_rows(Y);
}

ComplexMatrix riemannian_gradient_cached(const ComplexMatrix &Y,
                                         const ComplexMatrix &W) {
  return 2.0 * project_tangent(Y, W);
}

ComplexMatrix riemannian_gradient(const ReducedQuadraticForm &form,
                                  const ComplexMatrix &Y) {
  return riemannian_gradient_cached(Y, form.apply(Y));
}

ComplexMatrix riemannian_hessian_vec(const ReducedQuadraticForm &form,
                                     const ComplexMatrix &Y,
                                     const RealVector &radial,
                                     const ComplexMatrix &U) {
  const ComplexMatrix MU = form.apply(U);
  return project_tangent(
      Y, 2.0 * (MU - radial.cast<Complex>().asDiagonal() * U));
}

ComplexMatrix riemannian_hessian_vec(const ReducedQuadraticForm &form,
                                     const ComplexMatrix &Y,
                                     const ComplexMatrix &U) {
  const RealVector radial = radial_components(Y, form.apply(Y));
  return riemannian_hessian_vec(form, Y, radial, U);
}

}  // namespace cpl_slam
