#pragma once

#include <memory>

#include <Eigen/SparseCholesky>

#include "cpl_slam/measurement_graph.h"
#include "cpl_slam/types.h"

namespace cpl_slam {

/// True when entry(i,j) = conj(entry(j,i)) for every stored entry, to the
/// given absolute tolerance.
bool is_hermitian(const SparseComplex &M, Scalar tol = 1e-14);

/// The full Hermitian matrix of the estimation quadratic form over the state
/// [s; t; z] (landmarks, translations, rotations in that order), plus the
/// blocks needed for translation elimination:
///   gamma : (n_l + 2n) x (n_l + 2n), xi^H gamma xi = weighted LS objective
///   lambda: (n_l + n) x (n_l + n) real block over [s; t]
///   theta : (n_l + n) x n coupling of [s; t] to z
struct FullQuadraticModel {
  SparseComplex gamma;
  SparseReal lambda;
  SparseComplex theta;
  SparseComplex rot_laplacian;  // L over rotations (pose edges only)
  RealVector sigma_z;           // diagonal rotational weight correction
};

FullQuadraticModel build_full(const MeasurementGraph &g);

/// The translation-eliminated quadratic form
///   M = L + T^H Omega^{1/2} Pi Omega^{1/2} T
/// applied matrix-free. Pi projects onto ker(A Omega^{1/2}) and is realized
/// through a Cholesky factorization of the anchored edge Laplacian
/// A Omega A^T = Lambda (first pose row/column deleted), computed once at
/// build time and shared with translation recovery. A factorization of the
/// gauge-pinned full matrix gamma backs the trust-region preconditioner.
///
/// Immutable after build; apply() is pure and safe to call concurrently.
class ReducedQuadraticForm {
 public:
  static ReducedQuadraticForm build(const MeasurementGraph &g);

  int n() const { return n_; }
  int n_l() const { return n_l_; }
  int num_edges() const { return num_edges_; }

  /// M X for an n x r block; cost O(nnz) per column, no dense n x n matrix
  /// is formed.
  ComplexMatrix apply(const ComplexMatrix &X) const;

  /// Pi U: orthogonal projection of each column onto ker(A Omega^{1/2}).
  ComplexMatrix project_kernel(const ComplexMatrix &U) const;

  /// F(Y) = Re<Y, M Y>.
  Scalar objective(const ComplexMatrix &Y) const;

  /// Solves the gauge-pinned sparse system gamma [a'; a] = [0; b] columnwise
  /// and returns the rotation block a; approximates M^-1 b. The pinned
  /// rotation coordinate falls back to a Jacobi (diagonal) solve so the
  /// operator stays positive definite.
  ComplexMatrix precondition(const ComplexMatrix &B) const;

  /// Solves Lambda beta = -Theta z with the first pose translation anchored
  /// at zero; returns beta = [landmarks; translations].
  void recover_translations(const ComplexVector &z, ComplexVector &landmarks,
                            ComplexVector &translations) const;

  const SparseComplex &rot_laplacian() const { return L_; }
  const SparseComplex &T() const { return T_; }
  const RealVector &omega() const { return omega_; }
  const SparseReal &incidence() const { return A_; }
  const SparseReal &lambda() const { return full_.lambda; }
  const SparseComplex &theta() const { return full_.theta; }
  const SparseComplex &gamma() const { return full_.gamma; }
  const RealVector &sigma_z() const { return full_.sigma_z; }

  /// Upper bound on the operator 2-norm of M (Gershgorin of L plus the
  /// diagonal of T^H Omega T); used to scale certification thresholds and
  /// spectral shifts.
  Scalar opnorm_bound() const { return opnorm_bound_; }

 private:
  ReducedQuadraticForm() = default;

  int n_ = 0;
  int n_l_ = 0;
  int num_edges_ = 0;

  FullQuadraticModel full_;
  SparseComplex L_;      // == full_.rot_laplacian
  SparseComplex T_;      // (m_l + m) x n, landmark edges first
  SparseComplex T_adj_;  // n x (m_l + m)
  RealVector omega_;     // edge weights, landmark edges first
  RealVector omega_sqrt_;
  ComplexVector omega_sqrt_c_;  // complex copy for mixed products
  SparseReal A_;  // (n_l + n) x (m_l + m) incidence, landmark rows first
  SparseComplex A_c_;
  SparseComplex At_c_;

  // Factorizations are shared_ptr so the form stays copyable.
  std::shared_ptr<Eigen::SimplicialLDLT<SparseReal>> lap_solver_;  // anchored Lambda
  std::shared_ptr<Eigen::SimplicialLDLT<SparseComplex>> gamma_solver_;  // pinned gamma
  Scalar gamma_pinned_diag_ = 1.0;  // diagonal of gamma at the pinned rotation
  int anchor_ = 0;                  // anchored row of Lambda (first pose)
  Scalar opnorm_bound_ = 0.0;
};

/// Dense equivalence oracle: assembles the measurement factors
/// B1 = Omega^{1/2} A^T, B2 = Omega^{1/2} T and the rotation factor B3
/// explicitly and evaluates
///   M = B3^H B3 + B2^H (I - B1 (B1^H B1)^+ B1^H) B2
/// with an eigendecomposition pseudoinverse (relative cutoff 1e-10).
/// Intended for tests on small instances; guarded to n + n_l <= 2000.
struct DenseFactors {
  RealMatrix B1;
  ComplexMatrix B2;
  ComplexMatrix B3;
};

DenseFactors build_dense_factors(const MeasurementGraph &g);
ComplexMatrix build_dense_oracle(const MeasurementGraph &g);

}  // namespace cpl_slam
