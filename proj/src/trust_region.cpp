#include "cpl_slam/trust_region.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpl_slam {

void TrustRegionConfig::validate() const {
  if (!(accept_rho > 0.0 && accept_rho < 0.25)) {
    throw std::invalid_argument("TrustRegionConfig: accept_rho must be in (0, 0.25)");
  }
  if (!(tcg_kappa > 0.0 && tcg_kappa < 1.0)) {
    throw std::invalid_argument("TrustRegionConfig: tcg_kappa must be in (0, 1)");
  }
  if (!(tcg_theta > 0.0 && tcg_theta <= 1.0)) {
    throw std::invalid_argument("TrustRegionConfig: tcg_theta must be in (0, 1]");
  }
  if (!(initial_radius > 0.0) || !(max_radius >= initial_radius)) {
    throw std::invalid_argument("TrustRegionConfig: bad trust-region radii");
  }
}

const char *to_string(TcgStopReason reason) {
  switch (reason) {
    case TcgStopReason::kResidualTolerance:
      return "residual tolerance";
    case TcgStopReason::kNegativeCurvature:
      return "negative curvature";
    case TcgStopReason::kBoundaryHit:
      return "boundary hit";
    case TcgStopReason::kMaxIterations:
      return "max inner iterations";
  }
  return "unknown";
}

TcgResult tcg_solve(const ReducedQuadraticForm &form, const ComplexMatrix &Y,
                    const RealVector &radial, const ComplexMatrix &grad,
                    Scalar radius, const Preconditioner *precon,
                    const TrustRegionConfig &cfg) {
  TcgResult out;
  out.eta = ComplexMatrix::Zero(Y.rows(), Y.cols());

  ComplexMatrix r = grad;
  const Scalar r0_norm = std::sqrt(real_inner(r, r));
  if (!(r0_norm > 0.0)) {
    out.reason = TcgStopReason::kResidualTolerance;
    return out;
  }
  const Scalar target =
      r0_norm * std::min(std::pow(r0_norm, cfg.tcg_theta), cfg.tcg_kappa);

  auto precondition = [&](const ComplexMatrix &v) {
    return precon ? precon->apply(Y, v) : v;
  };

  ComplexMatrix z = precondition(r);
  Scalar z_r = real_inner(z, r);
  if (!(z_r > 0.0)) {
    // A preconditioner failure would break the CG recurrences; fall back to
    // the identity.
    z = r;
    z_r = real_inner(z, r);
  }
  ComplexMatrix delta = -z;
  ComplexMatrix H_eta = ComplexMatrix::Zero(Y.rows(), Y.cols());

  // Squared preconditioned norms: e_e = <eta, eta>_P, e_d = <eta, delta>_P,
  // d_d = <delta, delta>_P, maintained by the standard recurrences.
  Scalar e_e = 0.0;
  Scalar e_d = 0.0;
  Scalar d_d = z_r;
  const Scalar radius2 = radius * radius;

  auto model_value = [&](const ComplexMatrix &eta, const ComplexMatrix &H_eta_v) {
    return real_inner(grad, eta) + 0.5 * real_inner(eta, H_eta_v);
  };

  out.reason = TcgStopReason::kMaxIterations;
  for (int k = 0; k < cfg.max_inner_iters; ++k) {
    const ComplexMatrix H_delta = riemannian_hessian_vec(form, Y, radial, delta);
    const Scalar d_Hd = real_inner(delta, H_delta);
    const Scalar alpha = z_r / d_Hd;
    const Scalar e_e_next = e_e + 2.0 * alpha * e_d + alpha * alpha * d_d;

    if (d_Hd <= 0.0 || e_e_next >= radius2) {
      // Follow delta to the trust-region boundary.
      const Scalar tau =
          (-e_d + std::sqrt(e_d * e_d + d_d * (radius2 - e_e))) / d_d;
      out.eta += tau * delta;
      H_eta += tau * H_delta;
      out.iterations = k + 1;
      out.reason = d_Hd <= 0.0 ? TcgStopReason::kNegativeCurvature
                               : TcgStopReason::kBoundaryHit;
      out.model_history.push_back(model_value(out.eta, H_eta));
      out.step_norm_history.push_back(radius);
      break;
    }

    out.eta += alpha * delta;
    H_eta += alpha * H_delta;
    e_e = e_e_next;
    r += alpha * H_delta;
    out.iterations = k + 1;
    out.model_history.push_back(model_value(out.eta, H_eta));
    out.step_norm_history.push_back(std::sqrt(e_e));

    if (std::sqrt(real_inner(r, r)) <= target) {
      out.reason = TcgStopReason::kResidualTolerance;
      break;
    }

    z = precondition(r);
    const Scalar z_r_next = real_inner(z, r);
    const Scalar beta = z_r_next / z_r;
    e_d = beta * (e_d + alpha * d_d);
    d_d = z_r_next + beta * beta * d_d;
    delta = -z + beta * delta;
    z_r = z_r_next;
  }

  out.model_decrease = -model_value(out.eta, H_eta);
  return out;
}

RtrResult rtr_minimize(const ReducedQuadraticForm &form, const ComplexMatrix &Y0,
                       const Preconditioner *precon,
                       const TrustRegionConfig &cfg) {
  cfg.validate();
  if (!is_oblique_point(Y0, 1e-9)) {
    throw std::invalid_argument("rtr_minimize: Y0 is not feasible");
  }

  RtrResult out;
  out.Y = Y0;

  ComplexMatrix W = form.apply(out.Y);
  Scalar f = real_inner(out.Y, W);
  RealVector radial = radial_components(out.Y, W);
  ComplexMatrix grad = riemannian_gradient_cached(out.Y, W);
  Scalar grad_norm = std::sqrt(real_inner(grad, grad));

  const Scalar grad_tol =
      cfg.grad_norm_tol *
      (cfg.scale_grad_tol_by_init ? std::max(1.0, grad_norm) : 1.0);

  Scalar radius = cfg.initial_radius;
  out.stop_reason = "max outer iterations";

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    if (grad_norm <= grad_tol) {
      out.converged = true;
      out.stop_reason = "gradient tolerance";
      break;
    }

    const TcgResult step = tcg_solve(form, out.Y, radial, grad, radius, precon, cfg);
    out.total_inner_iterations += step.iterations;

    const ComplexMatrix Y_trial = retract(out.Y, step.eta);
    const ComplexMatrix W_trial = form.apply(Y_trial);
    const Scalar f_trial = real_inner(Y_trial, W_trial);

    // Regularize the ratio so floating-point cancellation near convergence
    // does not produce spurious rejections.
    const Scalar reg =
        std::numeric_limits<Scalar>::epsilon() * 1e2 * std::max(1.0, std::abs(f));
    const Scalar rho = (f - f_trial + reg) / (step.model_decrease + reg);
    const bool accepted = rho > cfg.accept_rho;

    RtrIterate it;
    it.iter = iter;
    it.objective = f;
    it.grad_norm = grad_norm;
    it.radius = radius;
    it.rho = rho;
    it.accepted = accepted;
    it.inner_iterations = step.iterations;
    it.inner_reason = step.reason;
    out.trace.push_back(it);

    if (rho < 0.25) {
      radius *= 0.25;
    } else if (rho > 0.75 && (step.reason == TcgStopReason::kNegativeCurvature ||
                              step.reason == TcgStopReason::kBoundaryHit)) {
      radius = std::min(2.0 * radius, cfg.max_radius);
    }

    if (accepted) {
      const Scalar decrease = f - f_trial;
      out.Y = Y_trial;
      W = W_trial;
      f = f_trial;
      radial = radial_components(out.Y, W);
      grad = riemannian_gradient_cached(out.Y, W);
      grad_norm = std::sqrt(real_inner(grad, grad));
      if (decrease <= cfg.rel_func_tol * std::max(1.0, std::abs(f))) {
        out.converged = grad_norm <= grad_tol;
        out.stop_reason = out.converged ? "gradient tolerance"
                                        : "relative function decrease";
        break;
      }
    } else if (radius < 1e-16) {
      out.converged = grad_norm <= grad_tol;
      out.stop_reason =
          out.converged ? "gradient tolerance" : "trust region collapsed";
      break;
    }
  }

  if (!out.converged && grad_norm <= grad_tol) {
    out.converged = true;
    out.stop_reason = "gradient tolerance";
  }

  out.objective = f;
  out.grad_norm = grad_norm;
  return out;
}

}  // namespace cpl_slam
