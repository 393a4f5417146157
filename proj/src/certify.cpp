#include "cpl_slam/certify.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cpl_slam/lanczos.h"

namespace cpl_slam {

const char *to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::kCertified:
      return "certified";
    case CertificateStatus::kSaddle:
      return "saddle";
    case CertificateStatus::kExhausted:
      return "exhausted";
  }
  return "unknown";
}

ComplexVector round_solution(const ComplexMatrix &Y, const RoundOptions &opts) {
  if (Y.size() == 0 || Y.norm() == 0.0) {
    throw std::invalid_argument("round_solution: Y is zero");
  }
  // Leading left singular vector through the r x r Gram matrix.
  const ComplexMatrix gram = Y.adjoint() * Y;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  const int top = static_cast<int>(gram.rows()) - 1;
  const Scalar sigma = std::sqrt(std::max(eig.eigenvalues()[top], 0.0));
  if (!(sigma > 0.0)) {
    throw std::runtime_error("round_solution: vanishing leading singular value");
  }
  ComplexVector u = Y * eig.eigenvectors().col(top) / sigma;

  ComplexVector z(u.size());
  for (int i = 0; i < u.size(); ++i) {
    Scalar mag = std::abs(u[i]);
    if (mag == 0.0) {
      if (!opts.perturb_zero_entries) {
        throw std::runtime_error(
            "round_solution: zero entry in the leading singular vector "
            "(degenerate); enable perturb_zero_entries to proceed");
      }
      u[i] = Complex(std::numeric_limits<Scalar>::epsilon(), 0.0);
      mag = std::abs(u[i]);
    }
    z[i] = u[i] / mag;
  }
  return z;
}

void recover_translations(const ReducedQuadraticForm &form,
                          const ComplexVector &z, ComplexVector &landmarks,
                          ComplexVector &translations) {
  form.recover_translations(z, landmarks, translations);
}

Certificate build_certificate(const ReducedQuadraticForm &form,
                              const ComplexVector &z,
                              const CertifyOptions &opts) {
  const int n = form.n();
  if (z.size() != n) {
    throw std::invalid_argument("build_certificate: z has wrong size");
  }

  Certificate cert;
  const ComplexMatrix w = form.apply(z);
  const RealVector lambda_hat =
      (w.array() * z.array().conjugate()).real().matrix();
  const Scalar f_z = real_inner(ComplexMatrix(z), w);
  cert.rounded_objective = f_z;
  cert.first_order_residual =
      (w - lambda_hat.cast<Complex>().asDiagonal() * z).norm();

  const Scalar scale = std::max(1.0, form.opnorm_bound());
  const Scalar eig_tol = opts.eig_tol_rel * scale;
  const Scalar residual_tol = opts.residual_tol_rel * scale;

  // lambda_max(S) <= opnorm(M) + max(0, -min diag(Lambda_hat)); shifting by
  // sigma makes sigma I - S positive semidefinite with its largest eigenpair
  // corresponding to lambda_min(S).
  const Scalar lam_min_diag = lambda_hat.size() > 0 ? lambda_hat.minCoeff() : 0.0;
  const Scalar sigma = form.opnorm_bound() + std::max(0.0, -lam_min_diag) + 1.0;

  auto shifted_op = [&](const ComplexVector &v) -> ComplexVector {
    const ComplexMatrix Sv =
        form.apply(v) - ComplexMatrix(lambda_hat.cast<Complex>().asDiagonal() * v);
    return sigma * v - ComplexVector(Sv);
  };

  // Deterministic seed near z: at a certified optimum z itself spans the
  // null space of S, so convergence is fast; the perturbation keeps a
  // component in every eigenspace.
  ComplexVector seed = z;
  for (int i = 0; i < n; ++i) {
    const Scalar t = static_cast<Scalar>(i + 1);
    seed[i] += Complex(0.01 * std::sin(1.7 * t), 0.01 * std::cos(2.3 * t));
  }

  LanczosOptions lopts;
  lopts.residual_tol = opts.lanczos_tol_rel * sigma;
  lopts.max_iterations = opts.max_eig_iterations > 0 ? opts.max_eig_iterations : 10 * n;
  const LanczosResult eig = lanczos_largest(n, shifted_op, seed, lopts);

  cert.eig_converged = eig.converged;
  cert.lambda_min = sigma - eig.eigenvalue;
  cert.eigvec = eig.eigenvector;

  const bool first_order = cert.first_order_residual <= residual_tol;
  const bool second_order = cert.lambda_min >= -eig_tol;
  if (eig.converged && first_order && second_order) {
    cert.status = CertificateStatus::kCertified;
  } else {
    cert.status = CertificateStatus::kSaddle;
    if (!eig.converged) {
      cert.diagnostic = "minimum-eigenvalue solver did not converge after " +
                        std::to_string(eig.iterations) + " iterations";
    } else if (!first_order) {
      cert.diagnostic = "first-order residual above tolerance";
    } else {
      cert.diagnostic = "negative certificate eigenvalue";
    }
  }

  // Clamp eigenvalues inside the numerical tolerance band to zero so the
  // reported gap is exactly zero for certified solutions.
  const Scalar lambda_eff = cert.lambda_min >= -eig_tol ? 0.0 : cert.lambda_min;
  cert.sdp_lower_bound = f_z + n * std::min(lambda_eff, 0.0);
  cert.relative_suboptimality =
      (f_z - cert.sdp_lower_bound) /
      std::max(std::abs(cert.sdp_lower_bound), opts.subopt_epsilon);
  if (cert.relative_suboptimality < 0.0) cert.relative_suboptimality = 0.0;
  return cert;
}

Solution assemble_solution(const MeasurementGraph &g,
                           const ReducedQuadraticForm &form,
                           const ComplexVector &z, Certificate certificate) {
  Solution sol;
  ComplexVector landmarks, translations;
  form.recover_translations(z, landmarks, translations);
  sol.poses.reserve(g.n);
  for (int i = 0; i < g.n; ++i) {
    sol.poses.emplace_back(translations[i], UnitComplex(z[i]));
  }
  sol.landmarks.assign(landmarks.data(), landmarks.data() + landmarks.size());
  sol.objective = mle_objective(g, sol.poses, sol.landmarks);
  sol.certificate = std::move(certificate);
  return sol;
}

Solution assemble_solution(const MeasurementGraph &g,
                           const ReducedQuadraticForm &form,
                           const ComplexMatrix &Y, const CertifyOptions &copts,
                           const RoundOptions &ropts) {
  const ComplexVector z = round_solution(Y, ropts);
  Certificate cert = build_certificate(form, z, copts);
  return assemble_solution(g, form, z, std::move(cert));
}

}  // namespace cpl_slam
