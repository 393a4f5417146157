#include "cpl_slam/g2o_io.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

namespace cpl_slam {

namespace {

// Splits the upper-triangular 2x2 information block into an isotropic
// precision by moment matching the implied covariance.
Scalar isotropic_precision_2x2(Scalar i11, Scalar i12, Scalar i22, int line) {
  const Scalar det = i11 * i22 - i12 * i12;
  if (!(det > 0.0) || !(i11 > 0.0)) {
    throw G2oParseError(line, "translational information block not positive definite");
  }
  const Scalar sxx = i22 / det;
  const Scalar syy = i11 / det;
  return 2.0 / (sxx + syy);
}

Scalar rotational_precision_3x3(const Eigen::Matrix3d &info, int line) {
  const Scalar det = info.determinant();
  if (!(det > 0.0)) {
    throw G2oParseError(line, "information matrix not positive definite");
  }
  const Scalar s_theta = info.inverse()(2, 2);
  if (!(s_theta > 0.0)) {
    throw G2oParseError(line, "rotational covariance not positive");
  }
  return 1.0 / s_theta;
}

struct IdResolver {
  std::unordered_map<long, int> pose_index;
  std::unordered_map<long, int> landmark_index;
  std::vector<long> pose_ids;
  std::vector<long> landmark_ids;

  int pose(long id, int line) {
    if (landmark_index.count(id)) {
      throw G2oParseError(line, "vertex id " + std::to_string(id) +
                                    " used as both pose and landmark");
    }
    auto [it, inserted] = pose_index.emplace(id, static_cast<int>(pose_ids.size()));
    if (inserted) pose_ids.push_back(id);
    return it->second;
  }

  int landmark(long id, int line) {
    if (pose_index.count(id)) {
      throw G2oParseError(line, "vertex id " + std::to_string(id) +
                                    " used as both pose and landmark");
    }
    auto [it, inserted] =
        landmark_index.emplace(id, static_cast<int>(landmark_ids.size()));
    if (inserted) landmark_ids.push_back(id);
    return it->second;
  }
};

}  // namespace

ParsedDataset parse_g2o(std::istream &in) {
  ParsedDataset ds;
  IdResolver ids;

  struct PoseGuess {
    int index;
    PlanarPose pose;
  };
  struct LandmarkGuess {
    int index;
    Complex position;
  };
  std::vector<PoseGuess> pose_guesses;
  std::vector<LandmarkGuess> landmark_guesses;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string tag;
    if (!(line >> tag)) continue;  // blank line

    if (tag == "VERTEX_SE2") {
      long id;
      Scalar x, y, theta;
      if (!(line >> id >> x >> y >> theta)) {
        throw G2oParseError(line_no, "malformed VERTEX_SE2 row");
      }
      pose_guesses.push_back({ids.pose(id, line_no),
                              PlanarPose(Complex(x, y), UnitComplex::from_angle(theta))});
    } else if (tag == "VERTEX_XY") {
      long id;
      Scalar x, y;
      if (!(line >> id >> x >> y)) {
        throw G2oParseError(line_no, "malformed VERTEX_XY row");
      }
      landmark_guesses.push_back({ids.landmark(id, line_no), Complex(x, y)});
    } else if (tag == "EDGE_SE2") {
      long id_i, id_j;
      Scalar dx, dy, dtheta, i11, i12, i13, i22, i23, i33;
      if (!(line >> id_i >> id_j >> dx >> dy >> dtheta >> i11 >> i12 >> i13 >>
            i22 >> i23 >> i33)) {
        throw G2oParseError(line_no, "malformed EDGE_SE2 row");
      }
      PosePoseEdge e;
      e.i = ids.pose(id_i, line_no);
      e.j = ids.pose(id_j, line_no);
      if (e.i == e.j) {
        throw G2oParseError(line_no, "EDGE_SE2 self-loop at vertex " +
                                         std::to_string(id_i));
      }
      e.t_meas = Complex(dx, dy);
      e.z_meas = UnitComplex::from_angle(dtheta);
      e.tau = isotropic_precision_2x2(i11, i12, i22, line_no);
      Eigen::Matrix3d info;
      info << i11, i12, i13, i12, i22, i23, i13, i23, i33;
      e.kappa = rotational_precision_3x3(info, line_no);
      ds.graph.pose_edges.push_back(e);
    } else if (tag == "EDGE_SE2_XY") {
      long id_i, id_j;
      Scalar dx, dy, i11, i12, i22;
      if (!(line >> id_i >> id_j >> dx >> dy >> i11 >> i12 >> i22)) {
        throw G2oParseError(line_no, "malformed EDGE_SE2_XY row");
      }
      PoseLandmarkEdge e;
      e.i = ids.pose(id_i, line_no);
      e.j = ids.landmark(id_j, line_no);
      e.s_meas = Complex(dx, dy);
      e.nu = isotropic_precision_2x2(i11, i12, i22, line_no);
      ds.graph.landmark_edges.push_back(e);
    } else {
      ds.warnings.push_back("line " + std::to_string(line_no) +
                            ": skipped unknown record tag '" + tag + "'");
    }
  }

  ds.graph.n = static_cast<int>(ids.pose_ids.size());
  ds.graph.n_l = static_cast<int>(ids.landmark_ids.size());
  ds.pose_ids = std::move(ids.pose_ids);
  ds.landmark_ids = std::move(ids.landmark_ids);

  ds.initial_poses.assign(ds.graph.n, PlanarPose::identity());
  ds.initial_landmarks.assign(ds.graph.n_l, Complex(0.0, 0.0));
  for (const auto &g : pose_guesses) ds.initial_poses[g.index] = g.pose;
  for (const auto &g : landmark_guesses) ds.initial_landmarks[g.index] = g.position;

  std::string errors;
  for (const Diagnostic &d : validate(ds.graph)) {
    if (d.severity == DiagnosticSeverity::kError) {
      if (!errors.empty()) errors += "; ";
      errors += d.message;
    }
  }
  if (!errors.empty()) {
    throw GraphValidationError("invalid measurement graph: " + errors);
  }
  return ds;
}

ParsedDataset parse_g2o_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open g2o file: " + path);
  }
  return parse_g2o(in);
}

void write_g2o(std::ostream &out, const MeasurementGraph &g,
               const std::vector<PlanarPose> &poses,
               const std::vector<Complex> &landmarks,
               const std::vector<long> *pose_ids,
               const std::vector<long> *landmark_ids) {
  if (static_cast<int>(poses.size()) != g.n ||
      static_cast<int>(landmarks.size()) != g.n_l) {
    throw std::invalid_argument("write_g2o: estimates do not cover all vertices");
  }
  auto pid = [&](int i) -> long { return pose_ids ? (*pose_ids)[i] : i; };
  auto lid = [&](int j) -> long {
    return landmark_ids ? (*landmark_ids)[j] : static_cast<long>(g.n) + j;
  };

  out << std::setprecision(17);
  for (int i = 0; i < g.n; ++i) {
    out << "VERTEX_SE2 " << pid(i) << ' ' << poses[i].translation.real() << ' '
        << poses[i].translation.imag() << ' ' << poses[i].rotation.angle() << '\n';
  }
  for (int j = 0; j < g.n_l; ++j) {
    out << "VERTEX_XY " << lid(j) << ' ' << landmarks[j].real() << ' '
        << landmarks[j].imag() << '\n';
  }
  for (const PosePoseEdge &e : g.pose_edges) {
    out << "EDGE_SE2 " << pid(e.i) << ' ' << pid(e.j) << ' '
        << e.t_meas.real() << ' ' << e.t_meas.imag() << ' '
        << e.z_meas.angle() << ' ' << e.tau << " 0 0 " << e.tau << " 0 "
        << e.kappa << '\n';
  }
  for (const PoseLandmarkEdge &e : g.landmark_edges) {
    out << "EDGE_SE2_XY " << pid(e.i) << ' ' << lid(e.j) << ' '
        << e.s_meas.real() << ' ' << e.s_meas.imag() << ' ' << e.nu << " 0 "
        << e.nu << '\n';
  }
}

void write_g2o_file(const std::string &path, const MeasurementGraph &g,
                    const std::vector<PlanarPose> &poses,
                    const std::vector<Complex> &landmarks,
                    const std::vector<long> *pose_ids,
                    const std::vector<long> *landmark_ids) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  write_g2o(out, g, poses, landmarks, pose_ids, landmark_ids);
}

}  // namespace cpl_slam
