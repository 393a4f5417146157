#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cpl_slam/g2o_io.h"
#include "cpl_slam/init.h"
#include "cpl_slam/solver.h"
#include "cpl_slam/synth.h"

namespace fs = std::filesystem;
using namespace cpl_slam;

namespace {

constexpr Scalar kRecoveryThreshold = 1e-6;

struct SolveCliOptions {
  std::string input;
  std::string init = "chordal";
  int r0 = 2;
  int rmax = 0;
  Scalar grad_tol = 1e-6;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool no_certify = false;
  bool quiet = false;
};

SolveOptions to_solve_options(const SolveCliOptions &cli) {
  SolveOptions opts;
  opts.init = cli.init == "odometry" ? InitMethod::kOdometry : InitMethod::kChordal;
  opts.seed = cli.seed;
  opts.staircase.r0 = cli.r0;
  opts.staircase.r_max = cli.rmax;
  opts.staircase.rtr.grad_norm_tol = cli.grad_tol;
  opts.staircase.certify_levels = !cli.no_certify;
  return opts;
}

void write_text_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int run_solve(const SolveCliOptions &cli) {
  const ParsedDataset ds = parse_g2o_file(cli.input);
  for (const std::string &w : ds.warnings) std::cerr << "warning: " << w << '\n';

  SolveOutput result = solve_graph(ds.graph, to_solve_options(cli),
                                   fs::path(cli.input).stem().string());

  fs::create_directories(cli.out_dir);
  const fs::path out_dir(cli.out_dir);
  {
    std::ofstream sol_out(out_dir / "solution.g2o");
    if (!sol_out) throw std::runtime_error("cannot write solution.g2o");
    write_g2o(sol_out, ds.graph, result.solution.poses, result.solution.landmarks,
              &ds.pose_ids, &ds.landmark_ids);
  }
  write_text_file(out_dir / "report.json", report_to_json(result.report));
  write_text_file(out_dir / "trajectory.csv", trajectory_to_csv(result.solution));

  if (!cli.quiet) {
    const RunReport &r = result.report;
    std::cout << "dataset: " << r.dataset << " (n=" << r.n << ", n'=" << r.n_l
              << ", m=" << r.m << ", m'=" << r.m_l << ")\n"
              << "objective: " << r.objective << '\n'
              << "certificate: " << r.certificate_status
              << " (lambda_min=" << r.lambda_min
              << ", rel_subopt=" << r.relative_suboptimality << ")\n"
              << "rank at termination: " << r.rank_at_termination << '\n'
              << "total time: " << r.total_seconds << " s\n";
  }
  return result.solution.certificate.certified() ? 0 : 2;
}

struct GenerateCliOptions {
  std::string kind;
  int n = 0;  // 0: kind default
  int n_l = 0;
  int grid = 25;
  Scalar cell = 1.0;
  Scalar p_c = 0.1;
  Scalar p_l = 0.2;
  Scalar sigma_t = -1.0, sigma_r = -1.0, sigma_l = -1.0;
  Scalar tau = -1.0, kappa = -1.0, nu = -1.0;
  std::uint64_t seed = 0;
  std::string out;
};

Scalar weight_from_sigma_translation(Scalar sigma) { return 2.0 / (sigma * sigma); }
Scalar weight_from_sigma_rotation(Scalar sigma) { return 1.0 / (sigma * sigma); }

SynthDataset generate_from_cli(const GenerateCliOptions &cli) {
  if (cli.kind == "city") {
    CityParams p;
    if (cli.n > 0) p.n = cli.n;
    p.grid_side = cli.grid;
    p.cell_m = cli.cell;
    p.p_C = cli.p_c;
    p.seed = cli.seed;
    if (cli.sigma_t > 0.0) p.tau = weight_from_sigma_translation(cli.sigma_t);
    if (cli.sigma_r > 0.0) p.kappa = weight_from_sigma_rotation(cli.sigma_r);
    if (cli.tau > 0.0) p.tau = cli.tau;
    if (cli.kappa > 0.0) p.kappa = cli.kappa;
    return generate_city(p);
  }
  TreeParams p;
  if (cli.n > 0) p.n = cli.n;
  if (cli.n_l > 0) p.n_l = cli.n_l;
  p.grid_side = cli.grid;
  p.cell_m = cli.cell;
  p.p_L = cli.p_l;
  p.seed = cli.seed;
  if (cli.sigma_t > 0.0) p.tau = weight_from_sigma_translation(cli.sigma_t);
  if (cli.sigma_r > 0.0) p.kappa = weight_from_sigma_rotation(cli.sigma_r);
  if (cli.sigma_l > 0.0) p.nu = weight_from_sigma_translation(cli.sigma_l);
  if (cli.tau > 0.0) p.tau = cli.tau;
  if (cli.kappa > 0.0) p.kappa = cli.kappa;
  if (cli.nu > 0.0) p.nu = cli.nu;
  return generate_tree(p);
}

// Odometry-integrated vertex guesses for the dataset file, so the file is
// self-contained without leaking the ground truth.
void odometry_guesses(const MeasurementGraph &g, std::vector<PlanarPose> &poses,
                      std::vector<Complex> &landmarks) {
  poses.assign(g.n, PlanarPose::identity());
  std::vector<bool> have_pose(g.n, false);
  have_pose[0] = true;
  // Generated graphs list odometry edges first in index order.
  for (const PosePoseEdge &e : g.pose_edges) {
    if (e.j == e.i + 1 && have_pose[e.i] && !have_pose[e.j]) {
      poses[e.j] = compose(poses[e.i], PlanarPose(e.t_meas, e.z_meas));
      have_pose[e.j] = true;
    }
  }
  landmarks.assign(g.n_l, Complex(0.0, 0.0));
  std::vector<bool> have_lm(g.n_l, false);
  for (const PoseLandmarkEdge &e : g.landmark_edges) {
    if (!have_lm[e.j]) {
      landmarks[e.j] = act(poses[e.i], e.s_meas);
      have_lm[e.j] = true;
    }
  }
}

int run_generate(const GenerateCliOptions &cli) {
  const SynthDataset ds = generate_from_cli(cli);
  const std::string out =
      cli.out.empty() ? cli.kind + ".g2o" : cli.out;

  std::vector<PlanarPose> guess_poses;
  std::vector<Complex> guess_landmarks;
  odometry_guesses(ds.graph, guess_poses, guess_landmarks);
  write_g2o_file(out, ds.graph, guess_poses, guess_landmarks);

  // Ground-truth sidecar: vertex rows only, same format.
  fs::path truth_path(out);
  truth_path.replace_extension(".truth.g2o");
  MeasurementGraph vertices_only;
  vertices_only.n = ds.graph.n;
  vertices_only.n_l = ds.graph.n_l;
  write_g2o_file(truth_path.string(), vertices_only, ds.truth.poses,
                 ds.truth.landmarks);

  std::cout << "wrote " << out << " (n=" << ds.graph.n << ", n'=" << ds.graph.n_l
            << ", m=" << ds.graph.m() << ", m'=" << ds.graph.m_l()
            << "), ground truth " << truth_path.string() << ", seed "
            << cli.seed << '\n';
  return 0;
}

struct BenchRun {
  std::string name;
  std::string group;
  Scalar param_value = 0.0;
  std::uint64_t seed = 0;
  // Filled by the worker.
  bool ok = false;
  std::string error;
  RunReport report;
};

int bench_worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned cap = std::min(hw, 8u);
  if (const char *env = std::getenv("CPL_SLAM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return static_cast<int>(cap);
}

int run_bench(const std::string &spec_path, const std::string &out_dir_str) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open bench spec: " + spec_path);
  nlohmann::json spec = nlohmann::json::parse(in);

  SolveCliOptions base;
  base.init = spec.value("init", "chordal");
  base.r0 = spec.value("r0", 2);
  base.grad_tol = spec.value("grad_tol", 1e-6);

  struct Job {
    BenchRun run;
    std::function<SynthDataset()> make;  // empty: dataset file
    std::string file;
  };
  std::vector<Job> jobs;

  for (const auto &path : spec.value("datasets", std::vector<std::string>{})) {
    Job job;
    job.run.name = fs::path(path).stem().string();
    job.run.group = "datasets";
    job.file = path;
    jobs.push_back(std::move(job));
  }

  for (const auto &sweep : spec.value("sweeps", nlohmann::json::array())) {
    const std::string kind = sweep.value("kind", "city");
    const std::string name = sweep.value("name", kind + "_sweep");
    std::vector<std::uint64_t> seeds;
    if (sweep.contains("seeds")) {
      seeds = sweep["seeds"].get<std::vector<std::uint64_t>>();
    } else {
      const int num = sweep.value("num_seeds", 10);
      for (int s = 0; s < num; ++s) seeds.push_back(s);
    }

    std::string swept_key;
    std::vector<Scalar> values;
    for (const char *key : {"sigma_r_values", "sigma_t_values", "sigma_l_values"}) {
      if (sweep.contains(key)) {
        swept_key = key;
        values = sweep[key].get<std::vector<Scalar>>();
        break;
      }
    }
    if (values.empty()) {
      swept_key = "single";
      values.push_back(0.0);
    }

    for (const Scalar value : values) {
      for (const std::uint64_t seed : seeds) {
        GenerateCliOptions gen;
        gen.kind = kind;
        gen.n = sweep.value("n", 0);
        gen.n_l = sweep.value("n_l", 0);
        gen.grid = sweep.value("grid", 25);
        gen.p_c = sweep.value("p_c", 0.1);
        gen.p_l = sweep.value("p_l", 0.2);
        gen.sigma_t = sweep.value("sigma_t", -1.0);
        gen.sigma_r = sweep.value("sigma_r", -1.0);
        gen.sigma_l = sweep.value("sigma_l", -1.0);
        gen.seed = seed;
        if (swept_key == "sigma_r_values") gen.sigma_r = value;
        if (swept_key == "sigma_t_values") gen.sigma_t = value;
        if (swept_key == "sigma_l_values") gen.sigma_l = value;

        Job job;
        job.run.name = name;
        job.run.group = name + "/" + swept_key + "=" + std::to_string(value);
        job.run.param_value = value;
        job.run.seed = seed;
        job.make = [gen]() { return generate_from_cli(gen); };
        jobs.push_back(std::move(job));
      }
    }
  }

  const SolveOptions solve_opts = to_solve_options(base);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      Job &job = jobs[idx];
      try {
        MeasurementGraph graph;
        if (job.make) {
          graph = job.make().graph;
        } else {
          graph = parse_g2o_file(job.file).graph;
        }
        SolveOutput result = solve_graph(graph, solve_opts, job.run.name);
        job.run.report = result.report;
        job.run.ok = true;
      } catch (const std::exception &ex) {
        job.run.error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min<int>(bench_worker_count(),
                                    std::max<size_t>(jobs.size(), 1));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto &t : pool) t.join();

  fs::create_directories(out_dir_str);
  const fs::path out_dir(out_dir_str);

  std::ostringstream runs;
  runs.precision(12);
  runs << "name,group,param_value,seed,n,n_landmarks,m,m_landmarks,objective,"
          "sdp_lower_bound,lambda_min,relative_suboptimality,status,recovered,"
          "total_seconds,error\n";
  std::map<std::string, std::pair<int, int>> recovery;  // group -> (recovered, total)
  for (const Job &job : jobs) {
    const BenchRun &r = job.run;
    runs << r.name << ',' << r.group << ',' << r.param_value << ',' << r.seed << ',';
    if (r.ok) {
      const bool recovered =
          r.report.relative_suboptimality < kRecoveryThreshold &&
          r.report.certificate_status == "certified";
      runs << r.report.n << ',' << r.report.n_l << ',' << r.report.m << ','
           << r.report.m_l << ',' << r.report.objective << ','
           << r.report.sdp_lower_bound << ',' << r.report.lambda_min << ','
           << r.report.relative_suboptimality << ','
           << r.report.certificate_status << ',' << (recovered ? 1 : 0) << ','
           << r.report.total_seconds << ",\n";
      auto &bucket = recovery[r.group];
      bucket.first += recovered ? 1 : 0;
      bucket.second += 1;
    } else {
      runs << ",,,,,,,,failed,0,," << '"' << r.error << '"' << '\n';
      recovery[r.group].second += 1;
    }
  }
  write_text_file(out_dir / "bench_runs.csv", runs.str());

  std::ostringstream summary;
  summary.precision(12);
  summary << "group,runs,recovered,recovery_rate\n";
  for (const auto &[group, counts] : recovery) {
    const Scalar rate =
        counts.second > 0 ? static_cast<Scalar>(counts.first) / counts.second : 0.0;
    summary << group << ',' << counts.second << ',' << counts.first << ','
            << rate << '\n';
  }
  write_text_file(out_dir / "bench_summary.csv", summary.str());

  std::cout << "bench: " << jobs.size() << " runs -> "
            << (out_dir / "bench_runs.csv").string() << '\n';
  return 0;
}

int run_certify(const std::string &dataset_path, const std::string &estimate_path,
                const std::string &out_dir) {
  const ParsedDataset ds = parse_g2o_file(dataset_path);

  // The estimate file needs only vertex rows; edges and unknown tags are
  // ignored.
  std::unordered_map<long, PlanarPose> est_poses;
  std::unordered_map<long, Complex> est_landmarks;
  {
    std::ifstream in(estimate_path);
    if (!in) throw std::runtime_error("cannot open estimate file: " + estimate_path);
    std::string line_str;
    while (std::getline(in, line_str)) {
      const auto hash = line_str.find('#');
      if (hash != std::string::npos) line_str.erase(hash);
      std::istringstream line(line_str);
      std::string tag;
      if (!(line >> tag)) continue;
      if (tag == "VERTEX_SE2") {
        long id;
        Scalar x, y, theta;
        if (line >> id >> x >> y >> theta) {
          est_poses[id] = PlanarPose(Complex(x, y), UnitComplex::from_angle(theta));
        }
      } else if (tag == "VERTEX_XY") {
        long id;
        Scalar x, y;
        if (line >> id >> x >> y) est_landmarks[id] = Complex(x, y);
      }
    }
  }

  ComplexVector z(ds.graph.n);
  std::vector<PlanarPose> poses(ds.graph.n);
  for (int i = 0; i < ds.graph.n; ++i) {
    const auto it = est_poses.find(ds.pose_ids[i]);
    if (it == est_poses.end()) {
      throw std::runtime_error("estimate file is missing pose id " +
                               std::to_string(ds.pose_ids[i]));
    }
    poses[i] = it->second;
    z[i] = it->second.rotation.value();
  }
  std::vector<Complex> landmarks(ds.graph.n_l);
  for (int j = 0; j < ds.graph.n_l; ++j) {
    const auto it = est_landmarks.find(ds.landmark_ids[j]);
    if (it == est_landmarks.end()) {
      throw std::runtime_error("estimate file is missing landmark id " +
                               std::to_string(ds.landmark_ids[j]));
    }
    landmarks[j] = it->second;
  }

  const ReducedQuadraticForm form = ReducedQuadraticForm::build(ds.graph);
  const Certificate cert = build_certificate(form, z);
  const Scalar objective = mle_objective(ds.graph, poses, landmarks);

  nlohmann::json j;
  j["schema_version"] = 1;
  j["dataset"] = fs::path(dataset_path).stem().string();
  j["objective_at_estimate"] = objective;
  j["certificate"] = {
      {"lambda_min", cert.lambda_min},
      {"first_order_residual", cert.first_order_residual},
      {"sdp_lower_bound", cert.sdp_lower_bound},
      {"rounded_objective", cert.rounded_objective},
      {"relative_suboptimality", cert.relative_suboptimality},
      {"status", to_string(cert.status)},
      {"diagnostic", cert.diagnostic},
  };
  const std::string text = j.dump(2);
  std::cout << text << '\n';
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(fs::path(out_dir) / "certificate.json", text);
  }
  return cert.certified() ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{
      "cpl-slam: certifiably correct planar graph-based SLAM with landmarks "
      "via complex semidefinite relaxation and Riemannian staircase "
      "optimization"};
  app.require_subcommand(1);

  SolveCliOptions solve_cli;
  CLI::App *solve_cmd = app.add_subcommand("solve", "Solve a g2o dataset");
  solve_cmd->add_option("input", solve_cli.input, "input .g2o file")->required();
  solve_cmd->add_option("--init", solve_cli.init, "initialization: chordal|odometry")
      ->check(CLI::IsMember({"chordal", "odometry"}));
  solve_cmd->add_option("--r0", solve_cli.r0, "initial staircase rank (>= 2)");
  solve_cmd->add_option("--rmax", solve_cli.rmax, "maximum staircase rank (0 = auto)");
  solve_cmd->add_option("--grad-tol", solve_cli.grad_tol, "gradient norm tolerance");
  solve_cmd->add_option("--seed", solve_cli.seed, "random seed (echoed in reports)");
  solve_cmd->add_option("--out", solve_cli.out_dir, "output directory");
  solve_cmd->add_flag("--no-certify", solve_cli.no_certify,
                      "skip optimality certification");
  solve_cmd->add_flag("--quiet", solve_cli.quiet, "suppress console summary");

  GenerateCliOptions gen_cli;
  CLI::App *gen_cmd = app.add_subcommand("generate", "Generate a synthetic dataset");
  gen_cmd->add_option("kind", gen_cli.kind, "dataset kind: city|tree")
      ->required()
      ->check(CLI::IsMember({"city", "tree"}));
  gen_cmd->add_option("--n", gen_cli.n, "number of poses");
  gen_cmd->add_option("--nl", gen_cli.n_l, "number of landmarks (tree)");
  gen_cmd->add_option("--grid", gen_cli.grid, "grid cells per side");
  gen_cmd->add_option("--cell", gen_cli.cell, "cell side length (m)");
  gen_cmd->add_option("--pc", gen_cli.p_c, "loop-closure probability (city)");
  gen_cmd->add_option("--pl", gen_cli.p_l, "landmark observation probability (tree)");
  gen_cmd->add_option("--sigma-t", gen_cli.sigma_t, "translational RMSE (m)");
  gen_cmd->add_option("--sigma-r", gen_cli.sigma_r, "angular RMSE (rad)");
  gen_cmd->add_option("--sigma-l", gen_cli.sigma_l, "landmark RMSE (m)");
  gen_cmd->add_option("--tau", gen_cli.tau, "translational precision (overrides sigma-t)");
  gen_cmd->add_option("--kappa", gen_cli.kappa, "rotational concentration (overrides sigma-r)");
  gen_cmd->add_option("--nu", gen_cli.nu, "landmark precision (overrides sigma-l)");
  gen_cmd->add_option("--seed", gen_cli.seed, "random seed");
  gen_cmd->add_option("--out", gen_cli.out, "output file (default <kind>.g2o)");

  std::string bench_spec;
  std::string bench_out = ".";
  CLI::App *bench_cmd = app.add_subcommand("bench", "Run a benchmark batch");
  bench_cmd->add_option("spec", bench_spec, "bench spec JSON")->required();
  bench_cmd->add_option("--out", bench_out, "output directory");

  std::string certify_dataset, certify_estimates, certify_out;
  CLI::App *certify_cmd =
      app.add_subcommand("certify", "Certify an existing estimate file");
  certify_cmd->add_option("dataset", certify_dataset, "dataset .g2o")->required();
  certify_cmd->add_option("estimates", certify_estimates, "estimate .g2o")->required();
  certify_cmd->add_option("--out", certify_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_cli);
    if (gen_cmd->parsed()) return run_generate(gen_cli);
    if (bench_cmd->parsed()) return run_bench(bench_spec, bench_out);
    if (certify_cmd->parsed()) return run_certify(certify_dataset, certify_estimates, certify_out);
  } catch (const std::exception &ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}
