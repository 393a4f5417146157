#include "cpl_slam/measurement_graph.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cpl_slam {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::vector<Diagnostic> validate(const MeasurementGraph &g) {
  std::vector<Diagnostic> out;
  auto error = [&out](std::string msg) {
    out.push_back({DiagnosticSeverity::kError, std::move(msg)});
  };
  auto warning = [&out](std::string msg) {
    out.push_back({DiagnosticSeverity::kWarning, std::move(msg)});
  };

  if (g.n <= 0) {
    error("graph has no poses");
    return out;
  }

  // Landmarks occupy indices n .. n + n_l - 1 in the union-find.
  UnionFind uf(g.num_vertices());
  std::vector<int> landmark_degree(g.n_l, 0);
  std::map<std::pair<int, int>, int> pose_edge_count;
  std::map<std::pair<int, int>, int> landmark_edge_count;

  for (size_t k = 0; k < g.pose_edges.size(); ++k) {
    const PosePoseEdge &e = g.pose_edges[k];
    if (e.i < 0 || e.i >= g.n || e.j < 0 || e.j >= g.n) {
      error("pose edge " + std::to_string(k) + " references invalid pose index");
      continue;
    }
    if (e.i == e.j) {
      error("pose edge " + std::to_string(k) + " is a self-loop at pose " +
            std::to_string(e.i));
      continue;
    }
    if (!(e.tau > 0.0)) {
      error("pose edge " + std::to_string(k) + " has non-positive tau");
    }
    if (e.kappa < 0.0) {
      error("pose edge " + std::to_string(k) + " has negative kappa");
    }
    uf.unite(e.i, e.j);
    ++pose_edge_count[{std::min(e.i, e.j), std::max(e.i, e.j)}];
  }

  for (size_t k = 0; k < g.landmark_edges.size(); ++k) {
    const PoseLandmarkEdge &e = g.landmark_edges[k];
    if (e.i < 0 || e.i >= g.n || e.j < 0 || e.j >= g.n_l) {
      error("landmark edge " + std::to_string(k) + " references invalid index");
      continue;
    }
    if (!(e.nu > 0.0)) {
      error("landmark edge " + std::to_string(k) + " has non-positive nu");
    }
    ++landmark_degree[e.j];
    uf.unite(e.i, g.n + e.j);
    ++landmark_edge_count[{e.i, e.j}];
  }

  for (int j = 0; j < g.n_l; ++j) {
    if (landmark_degree[j] == 0) {
      error("dangling landmark " + std::to_string(j) + " is never observed");
    }
  }

  int components = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (uf.find(v) == v) ++components;
  }
  // A dangling landmark already gets its own diagnostic; it also makes the
  // graph disconnected, which is reported once here.
  if (components > 1) {
    error("graph is disconnected: " + std::to_string(components) +
          " components over " + std::to_string(g.num_vertices()) + " vertices");
  }

  for (const auto &[key, count] : pose_edge_count) {
    if (count > 1) {
      warning("duplicate pose edges between " + std::to_string(key.first) +
              " and " + std::to_string(key.second) + " (x" +
              std::to_string(count) + "); weights accumulate");
    }
  }
  for (const auto &[key, count] : landmark_edge_count) {
    if (count > 1) {
      warning("duplicate landmark edges between pose " +
              std::to_string(key.first) + " and landmark " +
              std::to_string(key.second) + " (x" + std::to_string(count) +
              "); weights accumulate");
    }
  }

  return out;
}

bool is_valid(const MeasurementGraph &g) {
  for (const Diagnostic &d : validate(g)) {
    if (d.severity == DiagnosticSeverity::kError) return false;
  }
  return true;
}

Scalar mle_objective(const MeasurementGraph &g,
                     const std::vector<PlanarPose> &poses,
                     const std::vector<Complex> &landmarks) {
  if (static_cast<int>(poses.size()) != g.n ||
      static_cast<int>(landmarks.size()) != g.n_l) {
    throw std::invalid_argument("mle_objective: estimate size mismatch");
  }
  Scalar obj = 0.0;
  for (const PosePoseEdge &e : g.pose_edges) {
    const Complex zi = poses[e.i].rotation.value();
    const Complex zj = poses[e.j].rotation.value();
    const Complex ti = poses[e.i].translation;
    const Complex tj = poses[e.j].translation;
    obj += e.kappa * std::norm(zi * e.z_meas.value() - zj);
    obj += e.tau * std::norm(tj - ti - zi * e.t_meas);
  }
  for (const PoseLandmarkEdge &e : g.landmark_edges) {
    const Complex zi = poses[e.i].rotation.value();
    const Complex ti = poses[e.i].translation;
    obj += e.nu * std::norm(landmarks[e.j] - ti - zi * e.s_meas);
  }
  return obj;
}

}  // namespace cpl_slam
