#include "posebench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "posebench/error.hpp"

namespace posebench {

double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }
double rad_to_deg(double radians) { return radians * 180.0 / kPi; }

double wrap_degrees(double degrees) {
  if (!std::isfinite(degrees)) {
    throw ValidationError("angle is not finite: " + std::to_string(degrees));
  }
  // IEEE remainder is exact, so in-range values come back unchanged.
  const double r = std::remainder(degrees, 360.0);
  return r >= 180.0 ? -180.0 : r;
}

Angle::Angle(double radians) {
  if (!std::isfinite(radians)) {
    throw ValidationError("angle is not finite: " + std::to_string(radians));
  }
  // IEEE remainder is exact and lands in [-pi, pi].
  double r = std::remainder(radians, kTwoPi);
  if (r >= kPi) r = -kPi;
  radians_ = r;
}

Angle Angle::from_degrees(double degrees) {
  return Angle(deg_to_rad(wrap_degrees(degrees)));
}

Angle wrap(double raw_radians) { return Angle(raw_radians); }

double CirclePoint::norm() const { return std::hypot(s, c); }

CirclePoint encode(Angle a) { return {std::sin(a.radians()), std::cos(a.radians())}; }

Angle decode(CirclePoint p) {
  if (p.s == 0.0 && p.c == 0.0) {
    throw DegenerateDirection("cannot decode the zero vector to an angle");
  }
  return Angle(std::atan2(p.s, p.c));
}

double angular_distance(Angle a, Angle b) {
  double d = std::abs(a.radians() - b.radians());
  if (d > kPi) d = kTwoPi - d;
  return d;
}

ViewBinning::ViewBinning(int views, Angle origin_offset)
    : views_(views), origin_offset_(origin_offset) {
  if (views < 1) {
    throw ValidationError("number of views must be >= 1, got " + std::to_string(views));
  }
}

int ViewBinning::bin_of(Angle a) const {
  const double w = width();
  // Shift so that bin 0 starts at zero, then reduce into [0, 2pi).
  double t = a.radians() - origin_offset_.radians() + 0.5 * w;
  t -= kTwoPi * std::floor(t / kTwoPi);
  const int bin = static_cast<int>(std::floor(t / w));
  return std::clamp(bin, 0, views_ - 1);
}

Angle ViewBinning::bin_center(int bin) const {
  return Angle(origin_offset_.radians() + bin * width());
}

Rotation::Rotation(const Eigen::Matrix3d& m) : matrix_(m) {
  if (!m.allFinite()) throw ValidationError("rotation matrix has non-finite entries");
  const double orth = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orth > kTolerance) {
    throw ValidationError("matrix is not orthonormal (max |R^T R - I| = " +
                          std::to_string(orth) + ")");
  }
  if (std::abs(m.determinant() - 1.0) > kTolerance) {
    throw ValidationError("matrix is not a proper rotation (det = " +
                          std::to_string(m.determinant()) + ")");
  }
}

Rotation Rotation::about_x(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix3d m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return {m, Unchecked{}};
}

Rotation Rotation::about_z(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix3d m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return {m, Unchecked{}};
}

Rotation Rotation::from_axis_angle(const Eigen::Vector3d& axis, double theta) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw DegenerateDirection("rotation axis has zero length");
  const Eigen::Vector3d u = axis / n;
  Eigen::Matrix3d k;
  k << 0, -u.z(), u.y(),
       u.z(), 0, -u.x(),
       -u.y(), u.x(), 0;
  const Eigen::Matrix3d m =
      Eigen::Matrix3d::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
  return {m, Unchecked{}};
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  return {matrix_ * rhs.matrix_, Unchecked{}};
}

Rotation Rotation::transpose() const { return {matrix_.transpose(), Unchecked{}}; }

Rotation rotation_from_pose(const Pose& p) {
  return Rotation::about_z(p.inplane.radians()) *
         Rotation::about_x(-p.elevation.radians()) *
         Rotation::about_z(-p.azimuth.radians());
}

double geodesic_distance(const Rotation& r1, const Rotation& r2) {
  // atan2 of the skew and symmetric parts stays accurate near 0 and pi,
  // where acos of the trace loses half the digits.
  const Eigen::Matrix3d rel = r2.matrix().transpose() * r1.matrix();
  const Eigen::Vector3d axis_sin(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                                 rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * axis_sin.norm(), 0.5 * (rel.trace() - 1.0));
}

}  // namespace posebench
