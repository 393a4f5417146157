#include "cpl_slam/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace cpl_slam {

Scalar Rng::uniform01() {
  return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the draw exactly uniform and reproducible.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

Scalar Rng::normal() {
  Scalar u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const Scalar u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Scalar Rng::von_mises_angle(Scalar kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) {
    throw std::invalid_argument("von_mises_angle: kappa must be finite and >= 0");
  }
  if (kappa < 1e-8) {
    return M_PI * (2.0 * uniform01() - 1.0);
  }
  if (kappa > 1e7) {
    // Gaussian limit; total-variation distance to the exact distribution is
    // O(1/kappa) and the wrap probability is negligible at this scale.
    return normal() / std::sqrt(kappa);
  }
  // Best-Fisher (1979) rejection sampling.
  const Scalar a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const Scalar b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const Scalar r = (1.0 + b * b) / (2.0 * b);
  while (true) {
    const Scalar u1 = uniform01();
    const Scalar u2 = uniform01();
    const Scalar z = std::cos(M_PI * u1);
    const Scalar f = (1.0 + r * z) / (r + z);
    const Scalar c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 ||
        (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0)) {
      const Scalar u3 = uniform01();
      const Scalar theta = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 < 0.5 ? -theta : theta;
    }
  }
}

UnitComplex sample_vmf(const UnitComplex &mode, Scalar kappa, Rng &rng,
                       bool double_concentration) {
  const Scalar theta =
      rng.von_mises_angle(double_concentration ? 2.0 * kappa : kappa);
  return mode * UnitComplex::from_angle(theta);
}

Complex sample_translation_noise(Scalar tau, Rng &rng) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("sample_translation_noise: tau must be > 0");
  }
  const Scalar sigma = 1.0 / std::sqrt(tau);
  return Complex(sigma * rng.normal(), sigma * rng.normal());
}

namespace {

// Grid headings: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
const int kDx[4] = {1, 0, -1, 0};
const int kDy[4] = {0, 1, 0, -1};

UnitComplex heading_rotation(int h) {
  return UnitComplex(Complex(kDx[h], kDy[h]));
}

struct GridWalk {
  std::vector<int> x, y, heading;
};

// Rectilinear random walk on the vertices of a grid_side x grid_side cell
// grid. The robot turns first and then advances one cell, so consecutive
// poses always occupy adjacent vertices.
GridWalk random_walk(int n, int grid_side, Rng &rng) {
  GridWalk w;
  w.x.reserve(n);
  w.y.reserve(n);
  w.heading.reserve(n);

  int cx = grid_side / 2;
  int cy = grid_side / 2;
  int h = 0;
  w.x.push_back(cx);
  w.y.push_back(cy);
  w.heading.push_back(h);

  for (int k = 1; k < n; ++k) {
    // Prefer going straight; candidate headings that would leave the grid
    // are discarded.
    const int options[3] = {h, (h + 1) % 4, (h + 3) % 4};
    const Scalar weights[3] = {0.75, 0.125, 0.125};
    Scalar total = 0.0;
    bool feasible[3];
    for (int c = 0; c < 3; ++c) {
      const int nx = cx + kDx[options[c]];
      const int ny = cy + kDy[options[c]];
      feasible[c] = nx >= 0 && nx <= grid_side && ny >= 0 && ny <= grid_side;
      if (feasible[c]) total += weights[c];
    }
    Scalar pick = rng.uniform01() * total;
    int chosen = -1;
    for (int c = 0; c < 3; ++c) {
      if (!feasible[c]) continue;
      chosen = options[c];
      if (pick < weights[c]) break;
      pick -= weights[c];
    }
    h = chosen;
    cx += kDx[h];
    cy += kDy[h];
    w.x.push_back(cx);
    w.y.push_back(cy);
    w.heading.push_back(h);
  }
  return w;
}

std::vector<PlanarPose> walk_poses(const GridWalk &w, Scalar cell_m) {
  std::vector<PlanarPose> poses;
  poses.reserve(w.x.size());
  for (size_t k = 0; k < w.x.size(); ++k) {
    poses.emplace_back(Complex(w.x[k] * cell_m, w.y[k] * cell_m),
                       heading_rotation(w.heading[k]));
  }
  return poses;
}

PosePoseEdge measure_relative_pose(const std::vector<PlanarPose> &poses, int i,
                                   int j, Scalar tau, Scalar kappa, Rng &rng) {
  const PlanarPose rel = compose(inverse(poses[i]), poses[j]);
  PosePoseEdge e;
  e.i = i;
  e.j = j;
  e.tau = tau;
  e.kappa = kappa;
  e.t_meas = rel.translation;
  e.z_meas = rel.rotation;
  if (tau < kNoiselessWeight) e.t_meas += sample_translation_noise(tau, rng);
  if (kappa < kNoiselessWeight) e.z_meas = sample_vmf(rel.rotation, kappa, rng);
  return e;
}

void add_loop_closures(const GridWalk &w, const std::vector<PlanarPose> &poses,
                       Scalar p_C, Scalar tau, Scalar kappa, Rng &rng,
                       MeasurementGraph &g) {
  std::map<std::pair<int, int>, std::vector<int>> occupants;
  const int n = static_cast<int>(poses.size());
  for (int j = 0; j < n; ++j) {
    auto &prior = occupants[{w.x[j], w.y[j]}];
    for (int i : prior) {
      if (j - i <= 1) continue;  // sequential pairs already have odometry
      if (rng.uniform01() < p_C) {
        g.pose_edges.push_back(measure_relative_pose(poses, i, j, tau, kappa, rng));
      }
    }
    prior.push_back(j);
  }
}

}  // namespace

SynthDataset generate_city(const CityParams &p) {
  if (p.n < 1 || p.grid_side < 1 || p.p_C < 0.0 || p.p_C > 1.0 ||
      !(p.tau > 0.0) || !(p.kappa > 0.0) || !(p.cell_m > 0.0)) {
    throw std::invalid_argument("generate_city: invalid parameters");
  }
  Rng rng(p.seed);
  const GridWalk walk = random_walk(p.n, p.grid_side, rng);

  SynthDataset out;
  out.truth.poses = walk_poses(walk, p.cell_m);
  out.graph.n = p.n;
  out.graph.n_l = 0;
  for (int k = 0; k + 1 < p.n; ++k) {
    out.graph.pose_edges.push_back(
        measure_relative_pose(out.truth.poses, k, k + 1, p.tau, p.kappa, rng));
  }
  add_loop_closures(walk, out.truth.poses, p.p_C, p.tau, p.kappa, rng, out.graph);
  return out;
}

SynthDataset generate_tree(const TreeParams &p) {
  if (p.n < 1 || p.n_l < 1 || p.grid_side < 1 || p.p_L < 0.0 || p.p_L > 1.0 ||
      !(p.tau > 0.0) || !(p.kappa > 0.0) || !(p.nu > 0.0) || !(p.cell_m > 0.0)) {
    throw std::invalid_argument("generate_tree: invalid parameters");
  }
  if (p.n_l > p.grid_side * p.grid_side) {
    throw std::invalid_argument("generate_tree: more landmarks than grid cells");
  }
  Rng rng(p.seed);
  const GridWalk walk = random_walk(p.n, p.grid_side, rng);

  SynthDataset out;
  out.truth.poses = walk_poses(walk, p.cell_m);
  out.graph.n = p.n;
  out.graph.n_l = p.n_l;
  for (int k = 0; k + 1 < p.n; ++k) {
    out.graph.pose_edges.push_back(
        measure_relative_pose(out.truth.poses, k, k + 1, p.tau, p.kappa, rng));
  }

  const Scalar visibility = 2.0 * p.cell_m;
  std::set<std::pair<int, int>> used_cells;
  out.truth.landmarks.assign(p.n_l, Complex(0.0, 0.0));

  auto place_landmark = [&](int j) {
    while (true) {
      const int cx = rng.uniform_int(0, p.grid_side - 1);
      const int cy = rng.uniform_int(0, p.grid_side - 1);
      if (used_cells.insert({cx, cy}).second) {
        out.truth.landmarks[j] =
            Complex((cx + 0.5) * p.cell_m, (cy + 0.5) * p.cell_m);
        return;
      }
    }
  };

  auto observe_landmark = [&](int j) {
    std::vector<PoseLandmarkEdge> edges;
    for (int i = 0; i < p.n; ++i) {
      const Complex diff = out.truth.landmarks[j] - out.truth.poses[i].translation;
      if (std::abs(diff) > visibility) continue;
      if (rng.uniform01() >= p.p_L) continue;
      PoseLandmarkEdge e;
      e.i = i;
      e.j = j;
      e.nu = p.nu;
      e.s_meas = out.truth.poses[i].rotation.conjugated() * diff;
      if (p.nu < kNoiselessWeight) e.s_meas += sample_translation_noise(p.nu, rng);
      edges.push_back(e);
    }
    return edges;
  };

  for (int j = 0; j < p.n_l; ++j) {
    place_landmark(j);
    std::vector<PoseLandmarkEdge> edges = observe_landmark(j);
    // Unobserved landmarks get a fresh placement so the output always
    // validates; the retry cap only trips for degenerate parameters.
    int attempts = 0;
    while (edges.empty()) {
      if (++attempts > 1000) {
        throw std::runtime_error(
            "generate_tree: could not place an observable landmark; "
            "increase p_L or the trajectory length");
      }
      place_landmark(j);
      edges = observe_landmark(j);
    }
    out.graph.landmark_edges.insert(out.graph.landmark_edges.end(),
                                    edges.begin(), edges.end());
  }
  return out;
}

}  // namespace cpl_slam
