#pragma once

#include "cpl_slam/measurement_graph.h"
#include "cpl_slam/types.h"

namespace cpl_slam {

/// Chordal initialization of the rotation estimates: solves the rotation
/// synchronization system L z = 0 with z_0 pinned to 1 (sparse solve of the
/// pinned system) and normalizes every entry to unit modulus. Falls back to
/// odometric initialization, with a warning entry appended when `warnings`
/// is non-null, if the pinned solve cannot be performed (e.g. the pose-pose
/// subgraph is disconnected).
ComplexVector chordal_init(const MeasurementGraph &g,
                           std::vector<std::string> *warnings = nullptr);

/// Odometric initialization: rotations propagated by composing measurements
/// along a breadth-first spanning tree of the pose-pose subgraph rooted at
/// pose 0. Poses unreachable through pose-pose edges get the identity.
ComplexVector odometric_init(const MeasurementGraph &g);

}  // namespace cpl_slam
