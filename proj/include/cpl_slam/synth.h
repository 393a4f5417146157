#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cpl_slam/measurement_graph.h"
#include "cpl_slam/se2.h"
#include "cpl_slam/types.h"

namespace cpl_slam {

/// Deterministic random source: a seeded mt19937_64 with all variate
/// transformations implemented locally, so generated datasets are
/// bit-identical across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  Scalar uniform01();
  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);
  /// Standard normal via Box-Muller.
  Scalar normal();
  /// Angle from the von Mises distribution with mode 0; kappa = 0 is the
  /// uniform distribution on (-pi, pi]. Best-Fisher rejection sampling.
  Scalar von_mises_angle(Scalar kappa);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Draws from the von Mises-Fisher distribution on unit complex numbers with
/// the given mode. The concentration convention matches the weight/noise
/// correspondence sigma_R = kappa^{-1/2} (angular RMSE), e.g. kappa = 40.53
/// gives angular RMSE 0.05*pi rad. Set `double_concentration` to use the
/// density convention exp(2*kappa*cos(theta)) instead.
UnitComplex sample_vmf(const UnitComplex &mode, Scalar kappa, Rng &rng,
                       bool double_concentration = false);

/// Complex translational noise with independent N(0, 1/tau) components, so
/// the planar RMSE is sqrt(2/tau); tau = 88.89 gives RMSE 0.15 m.
Complex sample_translation_noise(Scalar tau, Rng &rng);

// Weights at or above this value are treated as exact (zero-noise)
// measurements by the generators, so noiseless instances reach objective
// values at machine precision instead of the chi-square floor that sampled
// noise of any magnitude would impose.
inline constexpr Scalar kNoiselessWeight = 1e10;

struct CityParams {
  int n = 3000;
  int grid_side = 25;     // cells per side
  Scalar cell_m = 1.0;    // cell side length in meters
  Scalar p_C = 0.1;       // loop-closure probability per coincident pair
  Scalar tau = 88.89;     // translational precision (sigma_t = 0.15 m)
  Scalar kappa = 40.53;   // rotational concentration (sigma_R = 0.05*pi rad)
  std::uint64_t seed = 0;
};

struct TreeParams {
  int n = 5000;
  int n_l = 250;
  int grid_side = 25;
  Scalar cell_m = 1.0;
  Scalar p_L = 0.2;      // per-pose observation probability within visibility
  Scalar tau = 800.0;    // sigma_t = 0.05 m
  Scalar kappa = 450.158;  // sigma_R = 0.015*pi rad
  Scalar nu = 800.0;     // sigma_l = 0.05 m
  std::uint64_t seed = 0;
};

struct GroundTruth {
  std::vector<PlanarPose> poses;
  std::vector<Complex> landmarks;
};

struct SynthDataset {
  MeasurementGraph graph;
  GroundTruth truth;
};

/// Rectilinear random-walk trajectory on a square grid with odometry edges
/// between consecutive poses and loop closures sampled with probability p_C
/// between non-sequential poses occupying the same grid vertex.
SynthDataset generate_city(const CityParams &p);

/// City-style trajectory plus n_l landmarks at random cell centers; a
/// pose-landmark edge is emitted with probability p_L whenever the pose is
/// within two cells of the landmark. Landmarks that end up unobserved are
/// re-placed and re-sampled so the generated graph always validates.
SynthDataset generate_tree(const TreeParams &p);

}  // namespace cpl_slam
