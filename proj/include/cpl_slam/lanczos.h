#pragma once

#include <functional>

#include "cpl_slam/types.h"

namespace cpl_slam {

using HermitianOp = std::function<ComplexVector(const ComplexVector &)>;

struct LanczosOptions {
  Scalar residual_tol = 1e-7;  // absolute: ||op(v) - theta v|| <= residual_tol
  int max_iterations = 0;      // 0: 10 * dim
  int krylov_dim = 0;          // 0: chosen from dim
};

struct LanczosResult {
  Scalar eigenvalue = 0.0;
  ComplexVector eigenvector;
  int iterations = 0;
  bool converged = false;
};

/// Algebraically largest eigenpair of a Hermitian operator via restarted
/// Lanczos with full reorthogonalization, seeded with `guess` (a random
/// vector when empty is not allowed: callers provide the seed so runs stay
/// deterministic).
LanczosResult lanczos_largest(int dim, const HermitianOp &op,
                              const ComplexVector &guess,
                              const LanczosOptions &opts = {});

}  // namespace cpl_slam
