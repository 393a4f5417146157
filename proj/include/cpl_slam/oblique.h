#pragma once

#include "cpl_slam/quadratic_form.h"
#include "cpl_slam/synth.h"
#include "cpl_slam/types.h"

namespace cpl_slam {

// Geometry of the complex oblique manifold OB(r, n): n x r complex matrices
// with unit-norm rows, treated as a Riemannian submanifold of C^{n x r} under
// the real inner product Re<X, Y>. At r = 1 this is the product of unit
// circles carrying the rotation estimates.

/// Row-wise squared norms of Y as a real vector.
RealVector row_norms_squared(const ComplexMatrix &Y);

/// True when every row of Y has unit norm within tol.
bool is_oblique_point(const ComplexMatrix &Y, Scalar tol = 1e-12);

/// Rescales every row of Y to unit norm; throws on a zero row.
ComplexMatrix normalize_rows(const ComplexMatrix &Y);

/// Re{ddiag(U Y^H)} as a real vector: the radial component of U at Y.
RealVector radial_components(const ComplexMatrix &Y, const ComplexMatrix &U);

/// proj_Y U = U - Re{ddiag(U Y^H)} Y. Idempotent and self-adjoint.
ComplexMatrix project_tangent(const ComplexMatrix &Y, const ComplexMatrix &U);

/// True when Re{ddiag(U Y^H)} vanishes within tol.
bool is_tangent(const ComplexMatrix &Y, const ComplexMatrix &U, Scalar tol = 1e-10);

/// Metric-projection retraction: row-normalizes Y + U. First-order (in fact
/// second-order, being a metric projection) agreement with the exponential
/// map; throws when a row of Y + U vanishes.
ComplexMatrix retract(const ComplexMatrix &Y, const ComplexMatrix &U);

/// Uniform random point on OB(r, n).
ComplexMatrix random_oblique(int n, int r, Rng &rng);

/// grad F(Y) = 2 (M Y - Re{ddiag(M Y Y^H)} Y) for F(Y) = trace(M Y Y^H).
ComplexMatrix riemannian_gradient(const ReducedQuadraticForm &form,
                                  const ComplexMatrix &Y);

/// Same, reusing W = form.apply(Y).
ComplexMatrix riemannian_gradient_cached(const ComplexMatrix &Y,
                                         const ComplexMatrix &W);

/// Hess F(Y)[U] = proj_Y(2 M U - 2 Re{ddiag(M Y Y^H)} U). `radial` is
/// Re{ddiag(W Y^H)} with W = form.apply(Y). Self-adjoint on the tangent
/// space at Y.
ComplexMatrix riemannian_hessian_vec(const ReducedQuadraticForm &form,
                                     const ComplexMatrix &Y,
                                     const RealVector &radial,
                                     const ComplexMatrix &U);

ComplexMatrix riemannian_hessian_vec(const ReducedQuadraticForm &form,
                                     const ComplexMatrix &Y,
                                     const ComplexMatrix &U);

}  // namespace cpl_slam
