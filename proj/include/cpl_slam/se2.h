#pragma once

#include <Eigen/Dense>

#include "cpl_slam/types.h"

namespace cpl_slam {

/// A planar rotation stored as a unit complex number. The unit-modulus
/// invariant |z| = 1 is restored on construction and after composition, so
/// long multiplication chains do not drift.
class UnitComplex {
 public:
  UnitComplex() : value_(1.0, 0.0) {}

  /// Normalizes the input; throws std::invalid_argument on a non-finite or
  /// zero input.
  explicit UnitComplex(Complex value);
  UnitComplex(Scalar re, Scalar im) : UnitComplex(Complex(re, im)) {}

  static UnitComplex identity() { return UnitComplex(); }
  static UnitComplex from_angle(Scalar theta);

  Scalar re() const { return value_.real(); }
  Scalar im() const { return value_.imag(); }
  Complex value() const { return value_; }

  /// Angle in (-pi, pi].
  Scalar angle() const;

  UnitComplex conjugated() const;
  UnitComplex operator*(const UnitComplex &rhs) const;
  Complex operator*(const Complex &rhs) const { return value_ * rhs; }

  Eigen::Matrix2d rotation_matrix() const;
  static UnitComplex from_rotation_matrix(const Eigen::Matrix2d &R);

 private:
  struct AlreadyUnit {};
  UnitComplex(Complex value, AlreadyUnit) : value_(value) {}

  Complex value_;
};

/// A planar rigid motion as a (translation, rotation) pair of complex numbers.
struct PlanarPose {
  Complex translation{0.0, 0.0};
  UnitComplex rotation;

  PlanarPose() = default;
  PlanarPose(Complex t, UnitComplex z) : translation(t), rotation(z) {}

  static PlanarPose identity() { return PlanarPose(); }

  Eigen::Matrix3d homogeneous_matrix() const;
  static PlanarPose from_homogeneous_matrix(const Eigen::Matrix3d &T);
};

/// Group multiplication: (t, z) * (t', z') = (z t' + t, z z').
PlanarPose compose(const PlanarPose &a, const PlanarPose &b);

/// Group inverse: (t, z)^-1 = (-conj(z) t, conj(z)).
PlanarPose inverse(const PlanarPose &a);

/// Rigid action on a point: z p + t.
Complex act(const PlanarPose &a, Complex p);

}  // namespace cpl_slam
