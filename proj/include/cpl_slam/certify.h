#pragma once

#include <string>
#include <vector>

#include "cpl_slam/measurement_graph.h"
#include "cpl_slam/quadratic_form.h"

namespace cpl_slam {

enum class CertificateStatus { kCertified, kSaddle, kExhausted };

const char *to_string(CertificateStatus status);

/// Global-optimality diagnostics for rotation estimates z: the minimum
/// eigenpair of the certificate operator S = M - Re{ddiag(M z z^H)}, the
/// first-order residual ||S z||, and the dual suboptimality bound
/// F(z) + n * min(lambda_min, 0). S z^H z = 0 by construction, so
/// lambda_min <= 0 always and the bound never exceeds F(z).
struct Certificate {
  Scalar lambda_min = 0.0;
  ComplexVector eigvec;
  Scalar first_order_residual = 0.0;
  Scalar sdp_lower_bound = 0.0;
  Scalar rounded_objective = 0.0;
  Scalar relative_suboptimality = 0.0;
  CertificateStatus status = CertificateStatus::kExhausted;
  bool eig_converged = false;
  std::string diagnostic;

  bool certified() const { return status == CertificateStatus::kCertified; }
};

struct CertifyOptions {
  // Scale-relative thresholds (multiplied by max(1, form.opnorm_bound())).
  Scalar eig_tol_rel = 1e-8;
  Scalar residual_tol_rel = 1e-8;
  // Minimum-eigenvalue solver controls.
  Scalar lanczos_tol_rel = 1e-7;
  int max_eig_iterations = 0;  // 0: 10 * n
  Scalar subopt_epsilon = 1e-12;
};

struct RoundOptions {
  // A zero entry in the leading singular vector is degenerate; by default it
  // is an error, optionally it is nudged by an eps-scale perturbation.
  bool perturb_zero_entries = false;
};

/// Rounds an oblique point to unit rotations: the leading left singular
/// vector of Y, entrywise normalized. Exact when rank(Y) = 1.
ComplexVector round_solution(const ComplexMatrix &Y,
                             const RoundOptions &opts = {});

/// beta = [landmarks; translations] minimizing the inner quadratic at fixed
/// rotations z, with the first pose anchored at the origin.
void recover_translations(const ReducedQuadraticForm &form,
                          const ComplexVector &z, ComplexVector &landmarks,
                          ComplexVector &translations);

/// Builds the certificate at unit rotations z. The minimum eigenpair of the
/// implicit operator S is computed by Lanczos on the shifted operator
/// sigma I - S, seeded near z. Eigensolver non-convergence downgrades the
/// status with a diagnostic rather than passing silently.
Certificate build_certificate(const ReducedQuadraticForm &form,
                              const ComplexVector &z,
                              const CertifyOptions &opts = {});

struct Solution {
  std::vector<PlanarPose> poses;
  std::vector<Complex> landmarks;
  Scalar objective = 0.0;  // recomputed from the measurement residuals
  Certificate certificate;
};

/// Recovers the translational states for given rotations and packages the
/// solution; the stored objective is recomputed directly from the
/// measurement residuals as a cross-check on the quadratic form.
Solution assemble_solution(const MeasurementGraph &g,
                           const ReducedQuadraticForm &form,
                           const ComplexVector &z, Certificate certificate);

/// Full post-processing of a staircase iterate: round, recover, certify.
Solution assemble_solution(const MeasurementGraph &g,
                           const ReducedQuadraticForm &form,
                           const ComplexMatrix &Y,
                           const CertifyOptions &copts = {},
                           const RoundOptions &ropts = {});

}  // namespace cpl_slam
