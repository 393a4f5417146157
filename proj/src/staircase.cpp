#include "cpl_slam/staircase.h"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cpl_slam {

namespace {

using Clock = std::chrono::steady_clock;

Scalar seconds_since(Clock::time_point t0) {
  return std::chrono::duration<Scalar>(Clock::now() - t0).count();
}

}  // namespace

void StaircaseConfig::validate(int n) const {
  if (r0 < 2) {
    throw std::invalid_argument("StaircaseConfig: r0 must be at least 2");
  }
  if (r_max != 0 && r_max < r0) {
    throw std::invalid_argument("StaircaseConfig: r_max must be >= r0");
  }
  if (r_max > n + 1) {
    throw std::invalid_argument("StaircaseConfig: r_max exceeds n + 1");
  }
  rtr.validate();
}

int numerical_rank(const ComplexMatrix &Y, Scalar rel_tol) {
  if (Y.size() == 0) return 0;
  const ComplexMatrix gram = Y.adjoint() * Y;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  const RealVector sv = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Scalar top = sv.maxCoeff();
  if (!(top > 0.0)) return 0;
  return static_cast<int>((sv.array() > rel_tol * top).count());
}

ComplexMatrix lift(const ComplexMatrix &Y, int r_next) {
  if (r_next <= Y.cols()) {
    throw std::invalid_argument("lift: target rank must exceed current rank");
  }
  ComplexMatrix out = ComplexMatrix::Zero(Y.rows(), r_next);
  out.leftCols(Y.cols()) = Y;
  return out;
}

ComplexMatrix escape_direction(const Certificate &cert,
                               const ComplexMatrix &Y_lifted) {
  if (!(cert.lambda_min < 0.0)) {
    throw std::invalid_argument(
        "escape_direction: certificate eigenvalue is nonnegative, no escape needed");
  }
  if (cert.eigvec.size() != Y_lifted.rows()) {
    throw std::invalid_argument("escape_direction: eigenvector size mismatch");
  }
  ComplexMatrix U = ComplexMatrix::Zero(Y_lifted.rows(), Y_lifted.cols());
  U.col(Y_lifted.cols() - 1) = cert.eigvec;
  // Already tangent when the appended column of Y is zero; project anyway to
  // absorb roundoff.
  return project_tangent(Y_lifted, U);
}

StaircaseResult solve_staircase(const ReducedQuadraticForm &form,
                                const ComplexVector &z0,
                                const StaircaseConfig &cfg) {
  const int n = form.n();
  cfg.validate(n);
  if (z0.size() != n) {
    throw std::invalid_argument("solve_staircase: z0 has wrong size");
  }

  const int r_max =
      cfg.r_max > 0
          ? cfg.r_max
          : std::min(n + 1,
                     static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 2);
  const int r_first = std::min(cfg.r0, n + 1);

  const Preconditioner precon(&form);
  const Preconditioner *precon_ptr = cfg.use_preconditioner ? &precon : nullptr;

  TrustRegionConfig polish_cfg = cfg.rtr;
  polish_cfg.grad_norm_tol =
      cfg.polish_grad_tol_rel * std::max(1.0, form.opnorm_bound());
  polish_cfg.scale_grad_tol_by_init = false;
  polish_cfg.max_outer_iters = cfg.polish_max_iters;
  polish_cfg.rel_func_tol = 0.0;  // run to the gradient tolerance

  StaircaseResult out;
  ComplexMatrix Y = lift(normalize_rows(z0), r_first);

  bool have_best = false;
  Scalar best_objective = 0.0;

  for (int r = r_first; r <= r_max; ++r) {
    StaircaseLevel level;
    level.rank = r;

    auto t0 = Clock::now();
    level.rtr = rtr_minimize(form, Y, precon_ptr, cfg.rtr);
    level.rtr_seconds = seconds_since(t0);
    Y = level.rtr.Y;
    level.numerical_rank = numerical_rank(Y, cfg.rank_rel_tol);

    t0 = Clock::now();
    ComplexVector z = round_solution(Y, cfg.rounding);
    if (n > 1) {
      const RtrResult polished =
          rtr_minimize(form, z, precon_ptr, polish_cfg);
      z = ComplexVector(polished.Y);
    }
    level.round_polish_seconds = seconds_since(t0);

    bool accept = false;
    if (cfg.certify_levels) {
      t0 = Clock::now();
      level.certificate = build_certificate(form, z, cfg.certify);
      level.certify_seconds = seconds_since(t0);
      accept = level.certificate.certified();
    } else {
      level.certificate.rounded_objective = form.objective(z);
      level.certificate.status = CertificateStatus::kExhausted;
      level.certificate.diagnostic = "certification disabled";
      accept = level.numerical_rank < r;
    }

    const Scalar f_z = level.certificate.rounded_objective;
    const bool improved = !have_best || f_z < best_objective;
    if (improved) {
      have_best = true;
      best_objective = f_z;
      out.Y = Y;
      out.z = z;
      out.certificate = level.certificate;
    }

    const Certificate &cert = level.certificate;
    out.levels.push_back(std::move(level));

    if (accept) {
      return out;
    }
    if (r == r_max) break;

    // Ascend: zero-pad, and when the certificate exposes a direction of
    // negative curvature, escape along it with a backtracking line search.
    ComplexMatrix Y_next = lift(Y, r + 1);
    if (cfg.certify_levels && cert.lambda_min < 0.0 && cert.eigvec.size() == n) {
      const ComplexMatrix U = escape_direction(cert, Y_next);
      const Scalar f_current = form.objective(Y);
      Scalar alpha = cfg.escape_step;
      bool escaped = false;
      for (int h = 0; h <= cfg.escape_max_halvings; ++h) {
        const ComplexMatrix Y_try = retract(Y_next, alpha * U);
        if (form.objective(Y_try) < f_current) {
          Y_next = Y_try;
          escaped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!escaped) {
        out.note = "saddle escape line search failed at rank " + std::to_string(r);
        out.certificate.status = CertificateStatus::kSaddle;
        return out;
      }
    }
    Y = Y_next;
  }

  out.certificate.status = CertificateStatus::kExhausted;
  if (out.note.empty()) {
    out.note = "rank schedule exhausted without certification";
  }
  return out;
}

}  // namespace cpl_slam
