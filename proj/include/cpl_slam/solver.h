#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpl_slam/certify.h"
#include "cpl_slam/staircase.h"

namespace cpl_slam {

enum class InitMethod { kChordal, kOdometry };

const char *to_string(InitMethod m);

struct SolveOptions {
  InitMethod init = InitMethod::kChordal;
  StaircaseConfig staircase;
  std::uint64_t seed = 0;  // reserved for randomized fallbacks; echoed in reports
};

struct LevelTiming {
  int rank = 0;
  Scalar rtr_seconds = 0.0;
  Scalar round_polish_seconds = 0.0;
  Scalar certify_seconds = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  Scalar objective = 0.0;
  Scalar grad_norm = 0.0;
  int numerical_rank = 0;
};

struct RunReport {
  int schema_version = 1;
  std::string dataset;
  int n = 0, n_l = 0, m = 0, m_l = 0;
  Scalar objective = 0.0;
  // Certificate fields, copied verbatim from the solution.
  Scalar lambda_min = 0.0;
  Scalar first_order_residual = 0.0;
  Scalar sdp_lower_bound = 0.0;
  Scalar rounded_objective = 0.0;
  Scalar relative_suboptimality = 0.0;
  std::string certificate_status;
  std::string certificate_diagnostic;
  // Stage wall times (seconds).
  Scalar build_seconds = 0.0;
  Scalar init_seconds = 0.0;
  std::vector<LevelTiming> staircase_levels;
  Scalar recovery_seconds = 0.0;
  Scalar total_seconds = 0.0;
  int rank_at_termination = 0;
  // Config echo.
  std::string init_method;
  int r0 = 0, r_max = 0;
  Scalar grad_norm_tol = 0.0;
  std::uint64_t seed = 0;
  bool certified_levels = true;
  std::vector<std::string> warnings;
};

struct SolveOutput {
  Solution solution;
  StaircaseResult staircase;
  RunReport report;
};

/// End-to-end pipeline: build the reduced form, initialize rotations, run
/// the staircase, recover translations and package report data.
SolveOutput solve_graph(const MeasurementGraph &g, const SolveOptions &options,
                        const std::string &dataset_name = "");

std::string report_to_json(const RunReport &report);

/// CSV rows "type,index,x,y,theta" with pose rows followed by landmark rows
/// (theta empty for landmarks).
std::string trajectory_to_csv(const Solution &solution);

}  // namespace cpl_slam
