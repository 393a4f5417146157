#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpl_slam/measurement_graph.h"

namespace cpl_slam {

class G2oParseError : public std::runtime_error {
 public:
  G2oParseError(int line, const std::string &what)
      : std::runtime_error("g2o parse error at line " + std::to_string(line) +
                           ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class GraphValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A measurement graph together with the per-vertex initial guesses stored in
/// the file and the raw-id <-> dense-index mapping. Raw vertex ids may be
/// sparse and interleaved; poses and landmarks are compacted to separate
/// 0-based index spaces in order of first appearance.
struct ParsedDataset {
  MeasurementGraph graph;
  std::vector<PlanarPose> initial_poses;   // identity when absent from file
  std::vector<Complex> initial_landmarks;  // origin when absent from file
  std::vector<long> pose_ids;              // dense pose index -> raw id
  std::vector<long> landmark_ids;          // dense landmark index -> raw id
  std::vector<std::string> warnings;       // skipped tags etc.
};

/// Parses line-oriented g2o text. Records understood:
///   VERTEX_SE2 id x y theta
///   VERTEX_XY id x y
///   EDGE_SE2 i j dx dy dtheta I11 I12 I13 I22 I23 I33   (upper-triangular)
///   EDGE_SE2_XY i j dx dy I11 I12 I22
/// '#' starts a comment; unknown tags are skipped with a warning. Isotropic
/// weights are extracted by moment matching: tau = 2/(S_xx + S_yy) with S the
/// inverse of the 2x2 translational information block, kappa = 1/S_theta with
/// S_theta the rotational entry of the inverse of the full 3x3 information
/// matrix, and nu like tau.
///
/// Throws G2oParseError on malformed rows and GraphValidationError when the
/// assembled graph fails validation (e.g. is disconnected).
ParsedDataset parse_g2o(std::istream &in);
ParsedDataset parse_g2o_file(const std::string &path);

/// Writes the graph and estimates in the same format. Raw ids are used when
/// provided (same shape as ParsedDataset); otherwise poses take ids 0..n-1
/// and landmarks n..n+n_l-1. parse_g2o(write_g2o(g)) reproduces the graph
/// with weights within 1e-9.
void write_g2o(std::ostream &out, const MeasurementGraph &g,
               const std::vector<PlanarPose> &poses,
               const std::vector<Complex> &landmarks,
               const std::vector<long> *pose_ids = nullptr,
               const std::vector<long> *landmark_ids = nullptr);
void write_g2o_file(const std::string &path, const MeasurementGraph &g,
                    const std::vector<PlanarPose> &poses,
                    const std::vector<Complex> &landmarks,
                    const std::vector<long> *pose_ids = nullptr,
                    const std::vector<long> *landmark_ids = nullptr);

}  // namespace cpl_slam
