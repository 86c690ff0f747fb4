#pragma once

#include <numbers>

#include <Eigen/Core>

namespace posebench {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg_to_rad(double degrees);
double rad_to_deg(double radians);

/// Wraps a value in degrees into [-180, 180). Exact; values already in
/// range come back unchanged.
double wrap_degrees(double degrees);

/// An angle in radians, always canonical in [-pi, pi).
class Angle {
 public:
  constexpr Angle() = default;
  /// Wraps any finite value; throws ValidationError on NaN or infinity.
  explicit Angle(double radians);

  static Angle from_degrees(double degrees);

  double radians() const { return radians_; }
  double degrees() const { return rad_to_deg(radians_); }

  friend bool operator==(Angle, Angle) = default;

 private:
  double radians_ = 0.0;
};

Angle wrap(double raw_radians);

/// Point on (or, for raw regressor outputs, near) the unit circle.
struct CirclePoint {
  double s = 0.0;  // sine component
  double c = 1.0;  // cosine component

  double norm() const;
  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;
};

/// (sin a, cos a).
CirclePoint encode(Angle a);
/// atan2(s, c); throws DegenerateDirection for the zero vector.
Angle decode(CirclePoint p);

/// Shortest arc between two angles, in [0, pi].
double angular_distance(Angle a, Angle b);

struct Pose {
  Angle azimuth;
  Angle elevation;
  Angle inplane;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Partition of the circle into `views` equal bins. Bin i is centered at
/// origin_offset + i * 2pi/views and covers [center - w/2, center + w/2).
class ViewBinning {
 public:
  explicit ViewBinning(int views, Angle origin_offset = Angle{});

  int views() const { return views_; }
  Angle origin_offset() const { return origin_offset_; }
  double width() const { return kTwoPi / views_; }

  int bin_of(Angle a) const;
  Angle bin_center(int bin) const;

 private:
  int views_;
  Angle origin_offset_;
};

inline int bin_of(Angle a, const ViewBinning& binning) { return binning.bin_of(a); }

/// Proper rotation matrix. Construction checks R^T R = I and det R = 1
/// within kTolerance.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation() : matrix_(Eigen::Matrix3d::Identity()) {}
  /// Throws ValidationError if `m` is not a proper rotation.
  explicit Rotation(const Eigen::Matrix3d& m);

  static Rotation about_x(double theta);
  static Rotation about_z(double theta);
  /// Rodrigues' formula; `axis` need not be normalized but must be nonzero.
  static Rotation from_axis_angle(const Eigen::Vector3d& axis, double theta);

  const Eigen::Matrix3d& matrix() const { return matrix_; }
  Rotation operator*(const Rotation& rhs) const;
  Rotation transpose() const;

 private:
  struct Unchecked {};
  Rotation(const Eigen::Matrix3d& m, Unchecked) : matrix_(m) {}

  Eigen::Matrix3d matrix_;
};

/// Rz(inplane) * Rx(-elevation) * Rz(-azimuth). Ground truth and predictions
/// must both go through this constructor for geodesic distances to be
/// meaningful.
Rotation rotation_from_pose(const Pose& p);

/// Angle of the relative rotation r2^T r1, in [0, pi]. Equal to
/// ||log(r2^T r1)||_F / sqrt(2).
double geodesic_distance(const Rotation& r1, const Rotation& r2);

}  // namespace posebench
