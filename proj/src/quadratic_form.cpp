#include "cpl_slam/quadratic_form.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace cpl_slam {

namespace {

// Removes the given (sorted) rows and columns from a square sparse matrix.
template <typename SparseT>
SparseT drop_rows_cols(const SparseT &M, const std::vector<int> &dropped) {
  const int dim = static_cast<int>(M.rows());
  std::vector<int> remap(dim, -1);
  int next = 0;
  size_t d = 0;
  for (int i = 0; i < dim; ++i) {
    if (d < dropped.size() && dropped[d] == i) {
      ++d;
      continue;
    }
    remap[i] = next++;
  }
  std::vector<Eigen::Triplet<typename SparseT::Scalar>> triplets;
  triplets.reserve(M.nonZeros());
  for (int k = 0; k < M.outerSize(); ++k) {
    for (typename SparseT::InnerIterator it(M, k); it; ++it) {
      const int r = remap[static_cast<int>(it.row())];
      const int c = remap[static_cast<int>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  SparseT out(next, next);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Solves a real SPD system against a complex right-hand side block.
ComplexMatrix solve_real(const Eigen::SimplicialLDLT<SparseReal> &solver,
                         const ComplexMatrix &B) {
  const RealMatrix re = solver.solve(B.real());
  const RealMatrix im = solver.solve(B.imag());
  return re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
}

}  // namespace

bool is_hermitian(const SparseComplex &M, Scalar tol) {
  if (M.rows() != M.cols()) return false;
  SparseComplex diff = SparseComplex(M.adjoint()) - M;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > tol) return false;
    }
  }
  return true;
}

FullQuadraticModel build_full(const MeasurementGraph &g) {
  const int n = g.n;
  const int n_l = g.n_l;
  const int dim = n_l + 2 * n;

  auto check_pose = [n](int i) {
    if (i < 0 || i >= n) throw std::out_of_range("build_full: pose index");
  };
  auto check_landmark = [n_l](int j) {
    if (j < 0 || j >= n_l) throw std::out_of_range("build_full: landmark index");
  };

  // State ordering: landmarks s_0..s_{n_l-1}, translations t_0..t_{n-1},
  // rotations z_0..z_{n-1}.
  auto z_idx = [n_l, n](int i) { return n_l + n + i; };

  std::vector<ComplexTriplet> gamma_t;
  std::vector<RealTriplet> lambda_t;
  std::vector<ComplexTriplet> theta_t;
  std::vector<ComplexTriplet> rot_t;
  RealVector sigma_z = RealVector::Zero(n);

  // Lambda shares the [s; t] ordering of gamma's top-left block.
  auto lam_s = [](int j) { return j; };
  auto lam_t = [n_l](int i) { return n_l + i; };

  for (const PosePoseEdge &e : g.pose_edges) {
    check_pose(e.i);
    check_pose(e.j);
    const Complex zm = e.z_meas.value();
    const Complex tm = e.t_meas;

    // Translation Laplacian L(W^t).
    lambda_t.emplace_back(lam_t(e.i), lam_t(e.i), e.tau);
    lambda_t.emplace_back(lam_t(e.j), lam_t(e.j), e.tau);
    lambda_t.emplace_back(lam_t(e.i), lam_t(e.j), -e.tau);
    lambda_t.emplace_back(lam_t(e.j), lam_t(e.i), -e.tau);

    // Rotation Laplacian L over the measurement-weighted graph.
    rot_t.emplace_back(e.i, e.i, Complex(e.kappa, 0.0));
    rot_t.emplace_back(e.j, e.j, Complex(e.kappa, 0.0));
    rot_t.emplace_back(e.i, e.j, -e.kappa * std::conj(zm));
    rot_t.emplace_back(e.j, e.i, -e.kappa * zm);

    // Translation-rotation coupling.
    theta_t.emplace_back(lam_t(e.i), e.i, e.tau * tm);
    theta_t.emplace_back(lam_t(e.j), e.i, -e.tau * tm);

    sigma_z[e.i] += e.tau * std::norm(tm);
  }

  for (const PoseLandmarkEdge &e : g.landmark_edges) {
    check_pose(e.i);
    check_landmark(e.j);
    const Complex sm = e.s_meas;

    lambda_t.emplace_back(lam_s(e.j), lam_s(e.j), e.nu);
    lambda_t.emplace_back(lam_t(e.i), lam_t(e.i), e.nu);
    lambda_t.emplace_back(lam_s(e.j), lam_t(e.i), -e.nu);
    lambda_t.emplace_back(lam_t(e.i), lam_s(e.j), -e.nu);

    theta_t.emplace_back(lam_s(e.j), e.i, -e.nu * sm);
    theta_t.emplace_back(lam_t(e.i), e.i, e.nu * sm);

    sigma_z[e.i] += e.nu * std::norm(sm);
  }

  FullQuadraticModel out;
  out.lambda.resize(n_l + n, n_l + n);
  out.lambda.setFromTriplets(lambda_t.begin(), lambda_t.end());
  out.theta.resize(n_l + n, n);
  out.theta.setFromTriplets(theta_t.begin(), theta_t.end());
  out.rot_laplacian.resize(n, n);
  out.rot_laplacian.setFromTriplets(rot_t.begin(), rot_t.end());
  out.sigma_z = sigma_z;

  // gamma assembles the same data over the full state.
  for (int k = 0; k < out.lambda.outerSize(); ++k) {
    for (SparseReal::InnerIterator it(out.lambda, k); it; ++it) {
      gamma_t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                           Complex(it.value(), 0.0));
    }
  }
  for (int k = 0; k < out.theta.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(out.theta, k); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int col = z_idx(static_cast<int>(it.col()));
      gamma_t.emplace_back(row, col, it.value());
      gamma_t.emplace_back(col, row, std::conj(it.value()));
    }
  }
  for (int k = 0; k < out.rot_laplacian.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(out.rot_laplacian, k); it; ++it) {
      gamma_t.emplace_back(z_idx(static_cast<int>(it.row())),
                           z_idx(static_cast<int>(it.col())), it.value());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (sigma_z[i] != 0.0) {
      gamma_t.emplace_back(z_idx(i), z_idx(i), Complex(sigma_z[i], 0.0));
    }
  }
  out.gamma.resize(dim, dim);
  out.gamma.setFromTriplets(gamma_t.begin(), gamma_t.end());
  return out;
}

ReducedQuadraticForm ReducedQuadraticForm::build(const MeasurementGraph &g) {
  ReducedQuadraticForm form;
  form.n_ = g.n;
  form.n_l_ = g.n_l;
  form.num_edges_ = g.num_edges();
  form.full_ = build_full(g);
  form.L_ = form.full_.rot_laplacian;

  const int m_l = g.m_l();
  const int m = g.m();
  const int ne = m_l + m;
  const int nv = g.n_l + g.n;

  // Edge ordering: landmark edges first, then pose edges. Vertex ordering:
  // landmarks first, then poses.
  form.omega_.resize(ne);
  std::vector<ComplexTriplet> T_t;
  std::vector<RealTriplet> A_t;
  for (int e = 0; e < m_l; ++e) {
    const PoseLandmarkEdge &edge = g.landmark_edges[e];
    form.omega_[e] = edge.nu;
    T_t.emplace_back(e, edge.i, -edge.s_meas);
    A_t.emplace_back(edge.j, e, 1.0);             // head: landmark
    A_t.emplace_back(g.n_l + edge.i, e, -1.0);    // tail: pose
  }
  for (int k = 0; k < m; ++k) {
    const PosePoseEdge &edge = g.pose_edges[k];
    const int e = m_l + k;
    form.omega_[e] = edge.tau;
    T_t.emplace_back(e, edge.i, -edge.t_meas);
    A_t.emplace_back(g.n_l + edge.j, e, 1.0);
    A_t.emplace_back(g.n_l + edge.i, e, -1.0);
  }
  form.omega_sqrt_ = form.omega_.cwiseSqrt();
  form.omega_sqrt_c_ = form.omega_sqrt_.cast<Complex>();
  form.T_.resize(ne, g.n);
  form.T_.setFromTriplets(T_t.begin(), T_t.end());
  form.T_adj_ = form.T_.adjoint();
  form.A_.resize(nv, ne);
  form.A_.setFromTriplets(A_t.begin(), A_t.end());
  form.A_c_ = form.A_.cast<Complex>();
  form.At_c_ = SparseComplex(form.A_c_.transpose());

  form.anchor_ = g.n_l;  // first pose row of Lambda

  if (ne > 0) {
    // Lambda equals the edge Laplacian A Omega A^T; anchoring one vertex
    // removes the all-ones nullspace of a connected graph.
    const SparseReal lap_anchored =
        drop_rows_cols(form.full_.lambda, {form.anchor_});
    form.lap_solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseReal>>();
    form.lap_solver_->compute(lap_anchored);
    if (form.lap_solver_->info() != Eigen::Success) {
      throw std::runtime_error(
          "ReducedQuadraticForm: anchored Laplacian factorization failed "
          "(is the graph connected?)");
    }

    // Pin the first pose translation and rotation of gamma for the
    // preconditioner solve.
    const int t0 = g.n_l;
    const int z0 = g.n_l + g.n;
    form.gamma_pinned_diag_ =
        std::max(form.full_.gamma.coeff(z0, z0).real(), 1e-12);
    const SparseComplex gamma_pinned =
        drop_rows_cols(form.full_.gamma, {t0, z0});
    form.gamma_solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseComplex>>();
    form.gamma_solver_->compute(gamma_pinned);
    if (form.gamma_solver_->info() != Eigen::Success) {
      throw std::runtime_error(
          "ReducedQuadraticForm: pinned full-matrix factorization failed");
    }
  }

  Scalar gersh = 0.0;
  RealVector row_abs = RealVector::Zero(g.n);
  for (int k = 0; k < form.L_.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(form.L_, k); it; ++it) {
      row_abs[it.row()] += std::abs(it.value());
    }
  }
  if (g.n > 0) gersh = row_abs.maxCoeff();
  form.opnorm_bound_ =
      gersh + (form.full_.sigma_z.size() > 0 ? form.full_.sigma_z.maxCoeff() : 0.0);
  return form;
}

ComplexMatrix ReducedQuadraticForm::project_kernel(const ComplexMatrix &U) const {
  if (num_edges_ == 0) return U;
  if (U.rows() != omega_.size()) {
    throw std::invalid_argument("project_kernel: dimension mismatch");
  }
  const ComplexMatrix scaled = omega_sqrt_c_.asDiagonal() * U;
  const ComplexMatrix rhs = A_c_ * scaled;

  // Solve the anchored system; the anchored coordinate of the solution is
  // zero, a valid representative since only Omega^{1/2} A^T w matters.
  const int nv = n_l_ + n_;
  ComplexMatrix rhs_red(nv - 1, U.cols());
  rhs_red.topRows(anchor_) = rhs.topRows(anchor_);
  rhs_red.bottomRows(nv - 1 - anchor_) = rhs.bottomRows(nv - 1 - anchor_);
  const ComplexMatrix w_red = solve_real(*lap_solver_, rhs_red);
  ComplexMatrix w(nv, U.cols());
  w.topRows(anchor_) = w_red.topRows(anchor_);
  w.row(anchor_).setZero();
  w.bottomRows(nv - 1 - anchor_) = w_red.bottomRows(nv - 1 - anchor_);

  return U - omega_sqrt_c_.asDiagonal() * (At_c_ * w).eval();
}

ComplexMatrix ReducedQuadraticForm::apply(const ComplexMatrix &X) const {
  if (X.rows() != n_) {
    throw std::invalid_argument("ReducedQuadraticForm::apply: X has wrong row count");
  }
  ComplexMatrix W = L_ * X;
  if (num_edges_ == 0) return W;
  ComplexMatrix U = omega_sqrt_c_.asDiagonal() * (T_ * X).eval();
  U = project_kernel(U);
  W.noalias() += T_adj_ * (omega_sqrt_c_.asDiagonal() * U).eval();
  return W;
}

Scalar ReducedQuadraticForm::objective(const ComplexMatrix &Y) const {
  return real_inner(Y, apply(Y));
}

ComplexMatrix ReducedQuadraticForm::precondition(const ComplexMatrix &B) const {
  if (B.rows() != n_) {
    throw std::invalid_argument("precondition: dimension mismatch");
  }
  if (!gamma_solver_) return B;  // edgeless problem: identity

  const int dim_red = n_l_ + 2 * n_ - 2;
  ComplexMatrix rhs = ComplexMatrix::Zero(dim_red, B.cols());
  // Reduced indexing: [s (n_l); t_1..t_{n-1}; z_1..z_{n-1}] after pinning
  // t_0 and z_0.
  const int z_offset = n_l_ + n_ - 1;
  rhs.bottomRows(n_ - 1) = B.bottomRows(n_ - 1);

  const ComplexMatrix sol = gamma_solver_->solve(rhs);
  ComplexMatrix A_out(n_, B.cols());
  A_out.row(0) = B.row(0) / gamma_pinned_diag_;
  A_out.bottomRows(n_ - 1) = sol.middleRows(z_offset, n_ - 1);
  return A_out;
}

void ReducedQuadraticForm::recover_translations(const ComplexVector &z,
                                                ComplexVector &landmarks,
                                                ComplexVector &translations) const {
  if (z.size() != n_) {
    throw std::invalid_argument("recover_translations: z has wrong size");
  }
  landmarks.resize(n_l_);
  translations.resize(n_);
  if (num_edges_ == 0) {
    landmarks.setZero();
    translations.setZero();
    return;
  }
  const ComplexVector rhs_full = -(full_.theta * z);
  const int nv = n_l_ + n_;
  ComplexVector rhs(nv - 1);
  rhs.head(anchor_) = rhs_full.head(anchor_);
  rhs.tail(nv - 1 - anchor_) = rhs_full.tail(nv - 1 - anchor_);
  const ComplexVector beta_red = solve_real(*lap_solver_, rhs);
  ComplexVector beta(nv);
  beta.head(anchor_) = beta_red.head(anchor_);
  beta[anchor_] = Complex(0.0, 0.0);
  beta.tail(nv - 1 - anchor_) = beta_red.tail(nv - 1 - anchor_);
  landmarks = beta.head(n_l_);
  translations = beta.tail(n_);
}

DenseFactors build_dense_factors(const MeasurementGraph &g) {
  if (g.num_vertices() > 2000) {
    throw std::invalid_argument("build_dense_factors: instance exceeds test-scale guard");
  }
  const int m_l = g.m_l();
  const int m = g.m();
  const int ne = m_l + m;

  DenseFactors f;
  f.B1 = RealMatrix::Zero(ne, g.n_l + g.n);
  f.B2 = ComplexMatrix::Zero(ne, g.n);
  f.B3 = ComplexMatrix::Zero(m, g.n);

  for (int e = 0; e < m_l; ++e) {
    const PoseLandmarkEdge &edge = g.landmark_edges[e];
    const Scalar w = std::sqrt(edge.nu);
    f.B1(e, edge.j) += w;               // head landmark
    f.B1(e, g.n_l + edge.i) += -w;      // tail pose
    f.B2(e, edge.i) += -w * edge.s_meas;
  }
  for (int k = 0; k < m; ++k) {
    const PosePoseEdge &edge = g.pose_edges[k];
    const int e = m_l + k;
    const Scalar w = std::sqrt(edge.tau);
    f.B1(e, g.n_l + edge.j) += w;
    f.B1(e, g.n_l + edge.i) += -w;
    f.B2(e, edge.i) += -w * edge.t_meas;

    const Scalar wk = std::sqrt(edge.kappa);
    f.B3(k, edge.j) += wk;
    f.B3(k, edge.i) += -wk * edge.z_meas.value();
  }
  return f;
}

ComplexMatrix build_dense_oracle(const MeasurementGraph &g) {
  const DenseFactors f = build_dense_factors(g);
  const int ne = static_cast<int>(f.B1.rows());

  // Pseudoinverse of B1 (B1^H B1)^+ B1^H through the eigendecomposition of
  // the real Gram matrix, relative cutoff 1e-10.
  const RealMatrix gram = f.B1.transpose() * f.B1;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram);
  const RealVector evals = eig.eigenvalues();
  const Scalar cutoff = (evals.size() > 0 ? evals.cwiseAbs().maxCoeff() : 0.0) * 1e-10;
  RealVector inv = RealVector::Zero(evals.size());
  for (int i = 0; i < evals.size(); ++i) {
    if (evals[i] > cutoff) inv[i] = 1.0 / evals[i];
  }
  const RealMatrix gram_pinv =
      eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

  const RealMatrix projector =
      RealMatrix::Identity(ne, ne) - f.B1 * gram_pinv * f.B1.transpose();
  return f.B3.adjoint() * f.B3 +
         f.B2.adjoint() * projector.cast<Complex>() * f.B2;
}

}  // namespace cpl_slam
