#include "cpl_slam/solver.h"

#include <chrono>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpl_slam/init.h"

namespace cpl_slam {

namespace {

using Clock = std::chrono::steady_clock;

Scalar seconds_since(Clock::time_point t0) {
  return std::chrono::duration<Scalar>(Clock::now() - t0).count();
}

}  // namespace

const char *to_string(InitMethod m) {
  return m == InitMethod::kChordal ? "chordal" : "odometry";
}

SolveOutput solve_graph(const MeasurementGraph &g, const SolveOptions &options,
                        const std::string &dataset_name) {
  SolveOutput out;
  RunReport &report = out.report;
  report.dataset = dataset_name;
  report.n = g.n;
  report.n_l = g.n_l;
  report.m = g.m();
  report.m_l = g.m_l();
  report.seed = options.seed;
  report.init_method = to_string(options.init);
  report.certified_levels = options.staircase.certify_levels;
  report.grad_norm_tol = options.staircase.rtr.grad_norm_tol;

  const auto t_total = Clock::now();

  auto t0 = Clock::now();
  const ReducedQuadraticForm form = ReducedQuadraticForm::build(g);
  report.build_seconds = seconds_since(t0);

  t0 = Clock::now();
  ComplexVector z0;
  if (options.init == InitMethod::kChordal) {
    z0 = chordal_init(g, &report.warnings);
  } else {
    z0 = odometric_init(g);
  }
  report.init_seconds = seconds_since(t0);

  out.staircase = solve_staircase(form, z0, options.staircase);
  if (!out.staircase.note.empty()) {
    report.warnings.push_back(out.staircase.note);
  }

  t0 = Clock::now();
  out.solution = assemble_solution(g, form, out.staircase.z,
                                   out.staircase.certificate);
  report.recovery_seconds = seconds_since(t0);

  for (const StaircaseLevel &level : out.staircase.levels) {
    LevelTiming lt;
    lt.rank = level.rank;
    lt.rtr_seconds = level.rtr_seconds;
    lt.round_polish_seconds = level.round_polish_seconds;
    lt.certify_seconds = level.certify_seconds;
    lt.outer_iterations = static_cast<int>(level.rtr.trace.size());
    lt.inner_iterations = level.rtr.total_inner_iterations;
    lt.objective = level.rtr.objective;
    lt.grad_norm = level.rtr.grad_norm;
    lt.numerical_rank = level.numerical_rank;
    report.staircase_levels.push_back(lt);
  }
  report.rank_at_termination = out.staircase.rank_at_termination();

  const Certificate &cert = out.solution.certificate;
  report.objective = out.solution.objective;
  report.lambda_min = cert.lambda_min;
  report.first_order_residual = cert.first_order_residual;
  report.sdp_lower_bound = cert.sdp_lower_bound;
  report.rounded_objective = cert.rounded_objective;
  report.relative_suboptimality = cert.relative_suboptimality;
  report.certificate_status = to_string(cert.status);
  report.certificate_diagnostic = cert.diagnostic;

  report.r0 = options.staircase.r0;
  report.r_max = options.staircase.r_max;
  report.total_seconds = seconds_since(t_total);
  return out;
}

std::string report_to_json(const RunReport &r) {
  nlohmann::json j;
  j["schema_version"] = r.schema_version;
  j["dataset"] = r.dataset;
  j["n"] = r.n;
  j["n_landmarks"] = r.n_l;
  j["m"] = r.m;
  j["m_landmarks"] = r.m_l;
  j["objective"] = r.objective;
  j["certificate"] = {
      {"lambda_min", r.lambda_min},
      {"first_order_residual", r.first_order_residual},
      {"sdp_lower_bound", r.sdp_lower_bound},
      {"rounded_objective", r.rounded_objective},
      {"relative_suboptimality", r.relative_suboptimality},
      {"status", r.certificate_status},
      {"diagnostic", r.certificate_diagnostic},
  };
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelTiming &lt : r.staircase_levels) {
    levels.push_back({
        {"rank", lt.rank},
        {"rtr_seconds", lt.rtr_seconds},
        {"round_polish_seconds", lt.round_polish_seconds},
        {"certify_seconds", lt.certify_seconds},
        {"outer_iterations", lt.outer_iterations},
        {"inner_iterations", lt.inner_iterations},
        {"objective", lt.objective},
        {"grad_norm", lt.grad_norm},
        {"numerical_rank", lt.numerical_rank},
    });
  }
  j["timings"] = {
      {"build_seconds", r.build_seconds},
      {"init_seconds", r.init_seconds},
      {"staircase_levels", levels},
      {"recovery_seconds", r.recovery_seconds},
      {"total_seconds", r.total_seconds},
  };
  j["rank_at_termination"] = r.rank_at_termination;
  j["config"] = {
      {"init", r.init_method},
      {"r0", r.r0},
      {"r_max", r.r_max},
      {"grad_norm_tol", r.grad_norm_tol},
      {"seed", r.seed},
      {"certify", r.certified_levels},
  };
  j["warnings"] = r.warnings;
  return j.dump(2);
}

std::string trajectory_to_csv(const Solution &solution) {
  std::ostringstream out;
  out.precision(17);
  out << "type,index,x,y,theta\n";
  for (size_t i = 0; i < solution.poses.size(); ++i) {
    const PlanarPose &p = solution.poses[i];
    out << "pose," << i << ',' << p.translation.real() << ','
        << p.translation.imag() << ',' << p.rotation.angle() << '\n';
  }
  for (size_t j = 0; j < solution.landmarks.size(); ++j) {
    out << "landmark," << j << ',' << solution.landmarks[j].real() << ','
        << solution.landmarks[j].imag() << ",\n";
  }
  return out.str();
}

}  // namespace cpl_slam
