#pragma once

#include <string>
#include <vector>

#include "cpl_slam/oblique.h"
#include "cpl_slam/quadratic_form.h"

namespace cpl_slam {

struct TrustRegionConfig {
  Scalar grad_norm_tol = 1e-6;
  bool scale_grad_tol_by_init = true;  // tolerance *= max(1, ||grad0||)
  Scalar rel_func_tol = 1e-10;
  int max_outer_iters = 500;
  Scalar initial_radius = 1.0;
  Scalar max_radius = 1e4;
  Scalar tcg_kappa = 0.1;   // fractional residual reduction
  Scalar tcg_theta = 0.5;   // superlinear exponent
  int max_inner_iters = 500;
  Scalar accept_rho = 0.1;

  void validate() const;
};

/// Approximate-inverse preconditioner for the truncated conjugate gradient
/// iteration: solves through the gauge-pinned factorization of the full
/// sparse matrix held by the form, then projects back to the tangent space.
/// Read-only during solves; shareable across runs on the same form.
class Preconditioner {
 public:
  explicit Preconditioner(const ReducedQuadraticForm *form) : form_(form) {}

  ComplexMatrix apply(const ComplexMatrix &Y, const ComplexMatrix &B) const {
    return project_tangent(Y, form_->precondition(B));
  }

 private:
  const ReducedQuadraticForm *form_;
};

enum class TcgStopReason {
  kResidualTolerance,
  kNegativeCurvature,
  kBoundaryHit,
  kMaxIterations,
};

const char *to_string(TcgStopReason reason);

struct TcgResult {
  ComplexMatrix eta;
  TcgStopReason reason = TcgStopReason::kResidualTolerance;
  int iterations = 0;
  Scalar model_decrease = 0.0;
  // Per-accepted-update histories, for the Steihaug monotonicity properties:
  // model values decrease, step norms (in the preconditioned metric) grow.
  std::vector<Scalar> model_history;
  std::vector<Scalar> step_norm_history;
};

/// Steihaug-Toint truncated conjugate gradient on the tangent space at Y.
/// `radial` caches Re{ddiag(M Y Y^H)}. Stops on the Steihaug conditions or
/// when ||r_k|| <= ||r_0|| min(||r_0||^theta, kappa). The trust region is
/// measured in the preconditioned norm when a preconditioner is given.
TcgResult tcg_solve(const ReducedQuadraticForm &form, const ComplexMatrix &Y,
                    const RealVector &radial, const ComplexMatrix &grad,
                    Scalar radius, const Preconditioner *precon,
                    const TrustRegionConfig &cfg);

struct RtrIterate {
  int iter = 0;
  Scalar objective = 0.0;
  Scalar grad_norm = 0.0;
  Scalar radius = 0.0;
  Scalar rho = 0.0;
  bool accepted = false;
  int inner_iterations = 0;
  TcgStopReason inner_reason = TcgStopReason::kResidualTolerance;
};

struct RtrResult {
  ComplexMatrix Y;
  Scalar objective = 0.0;
  Scalar grad_norm = 0.0;
  bool converged = false;  // gradient criterion met
  std::string stop_reason;
  std::vector<RtrIterate> trace;
  int total_inner_iterations = 0;
};

/// Riemannian trust-region method for F(Y) = trace(M Y Y^H) on OB(r, n).
/// Accepted steps are monotone non-increasing in F; the converged flag is set
/// only when the gradient tolerance is met. Deterministic given its inputs.
RtrResult rtr_minimize(const ReducedQuadraticForm &form, const ComplexMatrix &Y0,
                       const Preconditioner *precon, const TrustRegionConfig &cfg);

}  // namespace cpl_slam
