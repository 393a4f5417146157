#pragma once

#include <string>
#include <vector>

#include "cpl_slam/certify.h"
#include "cpl_slam/trust_region.h"

namespace cpl_slam {

struct StaircaseConfig {
  int r0 = 2;      // initial relaxation rank, >= 2
  int r_max = 0;   // 0: min(n + 1, ceil(sqrt(n)) + 2)
  Scalar rank_rel_tol = 1e-6;  // singular values below tol * sigma_1 are zero
  Scalar escape_step = 1.0;
  int escape_max_halvings = 25;
  TrustRegionConfig rtr;
  CertifyOptions certify;
  RoundOptions rounding;
  bool use_preconditioner = true;
  bool certify_levels = true;  // when false, stop on rank deficiency alone
  // Rank-1 refinement of the rounded estimate before certification, stated
  // relative to max(1, opnorm): tightens the first-order residual to the
  // certificate's scale.
  Scalar polish_grad_tol_rel = 1e-10;
  int polish_max_iters = 100;

  void validate(int n) const;
};

/// Count of singular values above rel_tol times the largest.
int numerical_rank(const ComplexMatrix &Y, Scalar rel_tol);

/// Appends zero columns; the objective, feasibility and gradient norm are
/// unchanged.
ComplexMatrix lift(const ComplexMatrix &Y, int r_next);

/// Second-order descent direction out of a lifted saddle: the certificate
/// eigenvector placed in the newly appended column. Requires
/// cert.lambda_min < 0; the result U is tangent with <Hess[U], U> =
/// 2 lambda_min ||v||^2 < 0.
ComplexMatrix escape_direction(const Certificate &cert,
                               const ComplexMatrix &Y_lifted);

struct StaircaseLevel {
  int rank = 0;
  RtrResult rtr;
  int numerical_rank = 0;
  Certificate certificate;
  Scalar rtr_seconds = 0.0;
  Scalar round_polish_seconds = 0.0;
  Scalar certify_seconds = 0.0;
};

struct StaircaseResult {
  ComplexMatrix Y;
  ComplexVector z;  // rounded (and polished) rotations
  Certificate certificate;
  std::vector<StaircaseLevel> levels;
  std::string note;  // escape failures etc.

  int rank_at_termination() const {
    return levels.empty() ? 0 : levels.back().rank;
  }
};

/// Runs the staircase: solve the rank-restricted problem at increasing rank,
/// round (with a rank-1 polish), certify, and either return the certified
/// estimate or lift -- escaping along the certificate eigenvector when the
/// level ended at a saddle. When the schedule is exhausted uncertified the
/// best iterate is returned and its certificate status is kExhausted.
StaircaseResult solve_staircase(const ReducedQuadraticForm &form,
                                const ComplexVector &z0,
                                const StaircaseConfig &cfg);

}  // namespace cpl_slam
