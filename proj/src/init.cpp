#include "cpl_slam/init.h"

#include <cmath>
#include <queue>
#include <vector>

#include <Eigen/SparseCholesky>

namespace cpl_slam {

ComplexVector odometric_init(const MeasurementGraph &g) {
  ComplexVector z = ComplexVector::Ones(g.n);
  if (g.n == 0) return z;

  std::vector<std::vector<std::pair<int, Complex>>> adjacency(g.n);
  for (const PosePoseEdge &e : g.pose_edges) {
    adjacency[e.i].push_back({e.j, e.z_meas.value()});
    adjacency[e.j].push_back({e.i, std::conj(e.z_meas.value())});
  }

  std::vector<bool> visited(g.n, false);
  std::queue<int> frontier;
  visited[0] = true;
  frontier.push(0);
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (const auto &[j, rel] : adjacency[i]) {
      if (visited[j]) continue;
      visited[j] = true;
      z[j] = z[i] * rel;
      z[j] /= std::abs(z[j]);
      frontier.push(j);
    }
  }
  return z;
}

ComplexVector chordal_init(const MeasurementGraph &g,
                           std::vector<std::string> *warnings) {
  const int n = g.n;
  if (n <= 1 || g.pose_edges.empty()) {
    return ComplexVector::Ones(std::max(n, 0));
  }

  std::vector<ComplexTriplet> triplets;
  triplets.reserve(4 * g.pose_edges.size());
  for (const PosePoseEdge &e : g.pose_edges) {
    const Complex zm = e.z_meas.value();
    triplets.emplace_back(e.i, e.i, Complex(e.kappa, 0.0));
    triplets.emplace_back(e.j, e.j, Complex(e.kappa, 0.0));
    triplets.emplace_back(e.i, e.j, -e.kappa * std::conj(zm));
    triplets.emplace_back(e.j, e.i, -e.kappa * zm);
  }
  SparseComplex L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());

  // Pin z_0 = 1: solve L[1:, 1:] z_rest = -L[1:, 0].
  std::vector<ComplexTriplet> red_triplets;
  red_triplets.reserve(triplets.size());
  ComplexVector rhs = ComplexVector::Zero(n - 1);
  for (int k = 0; k < L.outerSize(); ++k) {
    for (SparseComplex::InnerIterator it(L, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (r == 0) continue;
      if (c == 0) {
        rhs[r - 1] -= it.value();
      } else {
        red_triplets.emplace_back(r - 1, c - 1, it.value());
      }
    }
  }
  SparseComplex L_red(n - 1, n - 1);
  L_red.setFromTriplets(red_triplets.begin(), red_triplets.end());

  Eigen::SimplicialLDLT<SparseComplex> solver;
  solver.compute(L_red);
  if (solver.info() != Eigen::Success) {
    if (warnings) {
      warnings->push_back(
          "chordal initialization failed (singular pinned system); "
          "falling back to odometric initialization");
    }
    return odometric_init(g);
  }
  const ComplexVector z_rest = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !z_rest.allFinite()) {
    if (warnings) {
      warnings->push_back(
          "chordal initialization solve failed; falling back to odometric "
          "initialization");
    }
    return odometric_init(g);
  }

  ComplexVector z(n);
  z[0] = Complex(1.0, 0.0);
  z.tail(n - 1) = z_rest;
  for (int i = 0; i < n; ++i) {
    const Scalar mag = std::abs(z[i]);
    // An (unlikely) exactly-zero entry carries no direction information.
    z[i] = mag > 0.0 ? z[i] / mag : Complex(1.0, 0.0);
  }
  return z;
}

}  // namespace cpl_slam
