#include "cpl_slam/se2.h"

#include <cmath>
#include <stdexcept>

namespace cpl_slam {

UnitComplex::UnitComplex(Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw std::invalid_argument("UnitComplex: non-finite input");
  }
  const Scalar norm = std::abs(value);
  if (norm == 0.0) {
    throw std::invalid_argument("UnitComplex: zero input cannot be normalized");
  }
  value_ = value / norm;
}

UnitComplex UnitComplex::from_angle(Scalar theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("UnitComplex::from_angle: non-finite angle");
  }
  return UnitComplex(Complex(std::cos(theta), std::sin(theta)), AlreadyUnit{});
}

Scalar UnitComplex::angle() const {
  const Scalar a = std::atan2(value_.imag(), value_.real());
  // atan2 returns [-pi, pi]; fold -pi onto pi for a (-pi, pi] range.
  return a == -M_PI ? M_PI : a;
}

UnitComplex UnitComplex::conjugated() const {
  return UnitComplex(std::conj(value_), AlreadyUnit{});
}

UnitComplex UnitComplex::operator*(const UnitComplex &rhs) const {
  // Renormalize after every product so chained compositions stay on the
  // circle to within 1e-12.
  return UnitComplex(value_ * rhs.value_);
}

Eigen::Matrix2d UnitComplex::rotation_matrix() const {
  Eigen::Matrix2d R;
  R << re(), -im(), im(), re();
  return R;
}

UnitComplex UnitComplex::from_rotation_matrix(const Eigen::Matrix2d &R) {
  return UnitComplex(Complex(R(0, 0) + R(1, 1), R(1, 0) - R(0, 1)));
}

Eigen::Matrix3d PlanarPose::homogeneous_matrix() const {
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  T.topLeftCorner<2, 2>() = rotation.rotation_matrix();
  T(0, 2) = translation.real();
  T(1, 2) = translation.imag();
  return T;
}

PlanarPose PlanarPose::from_homogeneous_matrix(const Eigen::Matrix3d &T) {
  return PlanarPose(Complex(T(0, 2), T(1, 2)),
                    UnitComplex::from_rotation_matrix(T.topLeftCorner<2, 2>()));
}

PlanarPose compose(const PlanarPose &a, const PlanarPose &b) {
  return PlanarPose(a.rotation * b.translation + a.translation,
                    a.rotation * b.rotation);
}

PlanarPose inverse(const PlanarPose &a) {
  const UnitComplex zc = a.rotation.conjugated();
  return PlanarPose(-(zc * a.translation), zc);
}

Complex act(const PlanarPose &a, Complex p) {
  return a.rotation * p + a.translation;
}

}  // namespace cpl_slam
