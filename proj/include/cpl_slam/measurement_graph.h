#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpl_slam/se2.h"
#include "cpl_slam/types.h"

namespace cpl_slam {

/// Relative pose measurement from pose i to pose j with translational
/// precision tau (1/m^2) and rotational concentration kappa.
struct PosePoseEdge {
  int i = 0;
  int j = 0;
  Complex t_meas{0.0, 0.0};
  UnitComplex z_meas;
  Scalar tau = 1.0;
  Scalar kappa = 1.0;
};

/// Position of landmark j observed in the frame of pose i with precision nu.
struct PoseLandmarkEdge {
  int i = 0;
  int j = 0;
  Complex s_meas{0.0, 0.0};
  Scalar nu = 1.0;
};

enum class DiagnosticSeverity { kWarning, kError };

struct Diagnostic {
  DiagnosticSeverity severity;
  std::string message;
};

/// Measurement graph over n poses and n_l landmarks. Immutable once built;
/// parallel (duplicate) edges are legal and their weights accumulate in the
/// quadratic form.
struct MeasurementGraph {
  int n = 0;    // pose count
  int n_l = 0;  // landmark count
  std::vector<PosePoseEdge> pose_edges;
  std::vector<PoseLandmarkEdge> landmark_edges;

  int m() const { return static_cast<int>(pose_edges.size()); }
  int m_l() const { return static_cast<int>(landmark_edges.size()); }
  int num_vertices() const { return n + n_l; }
  int num_edges() const { return m() + m_l(); }
};

/// Checks connectivity (union-find over poses and landmarks), dangling
/// landmarks, duplicate edges and non-positive weights. Pure: repeated calls
/// return the same list.
std::vector<Diagnostic> validate(const MeasurementGraph &g);

/// True when validate() reports no error-severity diagnostics.
bool is_valid(const MeasurementGraph &g);

/// Evaluates the weighted least-squares estimation objective term by term:
///   sum over pose edges of kappa |z_i z~_ij - z_j|^2 + tau |t_j - t_i - z_i t~_ij|^2
/// + sum over landmark edges of nu |s_j - t_i - z_i s~_ij|^2.
Scalar mle_objective(const MeasurementGraph &g,
                     const std::vector<PlanarPose> &poses,
                     const std::vector<Complex> &landmarks);

}  // namespace cpl_slam
