#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace umereg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using PointId = std::int64_t;

/// Seeded random stream. Always passed explicitly, never global.
using Rng = std::mt19937_64;

/// Ordered set of 3D points with optional per-point correspondence ids.
///
/// Immutable once built: every operation returns a new cloud. The
/// constructor rejects non-finite coordinates, id/point length mismatches
/// and duplicate ids.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> points);
  PointCloud(std::vector<Vec3> points, std::vector<PointId> ids);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Vec3> points() const noexcept { return points_; }

  bool has_ids() const noexcept { return ids_.has_value(); }
  std::span<const PointId> ids() const;

  /// Cloud with the same ids but new coordinates (same length required).
  PointCloud with_points(std::vector<Vec3> points) const;
  /// Subset by positional index, ids carried along.
  PointCloud select(std::span<const std::size_t> indices) const;

 private:
  std::vector<Vec3> points_;
  std::optional<std::vector<PointId>> ids_;
};

/// Cloud with ids 0..n-1.
PointCloud with_sequential_ids(std::vector<Vec3> points);

/// Rotation R in SO(3) plus translation t; x -> R x + t.
class RigidTransform {
 public:
  /// Identity.
  RigidTransform();
  /// Throws InvalidInput unless R^T R = I and det R = +1 within 1e-12.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  /// Skips validation; used for results of closed-form solvers whose output
  /// is orthonormal by construction.
  static RigidTransform unchecked(const Mat3& rotation, const Vec3& translation);
  static RigidTransform identity() { return {}; }

  const Mat3& rotation() const noexcept { return R_; }
  const Vec3& translation() const noexcept { return t_; }

  Vec3 operator()(const Vec3& p) const { return R_ * p + t_; }

 private:
  Mat3 R_;
  Vec3 t_;
};

/// True when R is orthonormal with det +1 within tol (elementwise).
bool is_rotation(const Mat3& R, double tol = 1e-12);

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T);

/// Applies T2 first, then T1.
RigidTransform compose(const RigidTransform& T1, const RigidTransform& T2);
RigidTransform invert(const RigidTransform& T);

struct Interval {
  double lo;
  double hi;
};

/// Rotation about a principal axis, angle in radians.
Mat3 rot_x(double rad);
Mat3 rot_y(double rad);
Mat3 rot_z(double rad);

/// Extrinsic X-then-Y-then-Z Euler angles in degrees: R = Rz * Ry * Rx.
Mat3 euler_xyz_deg(double x_deg, double y_deg, double z_deg);

/// Three independent uniform Euler angles in euler_range_deg (extrinsic XYZ)
/// and a uniform translation per component in trans_range.
RigidTransform random_rigid(Rng& rng, Interval euler_range_deg, Interval trans_range);

struct Normalized {
  PointCloud cloud;
  double scale;
  Vec3 center;
};

/// Centers on the centroid and divides by the largest point norm. When every
/// point coincides with the centroid the scale is 1.
Normalized normalize_unit_sphere(const PointCloud& cloud);

/// Correctly rounded mean of the points (order-independent).
Vec3 centroid(std::span<const Vec3> points);

}  // namespace umereg
