#include "umereg/geom.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace umereg {

namespace {

void check_points(const std::vector<Vec3>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) throw InvalidInput("point " + std::to_string(i) + " has a non-finite coordinate");
  }
}

void check_ids(const std::vector<PointId>& ids, std::size_t n) {
  if (ids.size() != n) throw InvalidInput("id count does not match point count");
  std::unordered_set<PointId> seen;
  seen.reserve(ids.size());
  for (PointId id : ids) {
    if (!seen.insert(id).second) throw InvalidInput("duplicate point id " + std::to_string(id));
  }
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) { check_points(points_); }

PointCloud::PointCloud(std::vector<Vec3> points, std::vector<PointId> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
  check_points(points_);
  check_ids(*ids_, points_.size());
}

std::span<const PointId> PointCloud::ids() const {
  if (!ids_) return {};
  return *ids_;
}

PointCloud PointCloud::with_points(std::vector<Vec3> points) const {
  if (points.size() != points_.size()) throw InvalidInput("with_points: size mismatch");
  PointCloud out;
  check_points(points);
  out.points_ = std::move(points);
  out.ids_ = ids_;
  return out;
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.points_.reserve(indices.size());
  if (ids_) out.ids_.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= points_.size()) throw InvalidInput("select: index out of range");
    out.points_.push_back(points_[i]);
    if (ids_) out.ids_->push_back((*ids_)[i]);
  }
  if (out.ids_) check_ids(*out.ids_, out.points_.size());
  return out;
}

PointCloud with_sequential_ids(std::vector<Vec3> points) {
  std::vector<PointId> ids(points.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<PointId>(i);
  return PointCloud(std::move(points), std::move(ids));
}

bool is_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  const Mat3 gram = R.transpose() * R;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform() : R_(Mat3::Identity()), t_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation) : R_(rotation), t_(translation) {
  if (!is_rotation(R_)) throw InvalidInput("rotation matrix is not in SO(3)");
  if (!t_.allFinite()) throw InvalidInput("translation has a non-finite component");
}

RigidTransform RigidTransform::unchecked(const Mat3& rotation, const Vec3& translation) {
  RigidTransform T;
  T.R_ = rotation;
  T.t_ = translation;
  return T;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back(T(p));
  return cloud.with_points(std::move(out));
}

RigidTransform compose(const RigidTransform& T1, const RigidTransform& T2) {
  return RigidTransform::unchecked(T1.rotation() * T2.rotation(), T1.rotation() * T2.translation() + T1.translation());
}

RigidTransform invert(const RigidTransform& T) {
  const Mat3 Rt = T.rotation().transpose();
  return RigidTransform::unchecked(Rt, -(Rt * T.translation()));
}

Mat3 rot_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Mat3 rot_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Mat3 rot_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

Mat3 euler_xyz_deg(double x_deg, double y_deg, double z_deg) {
  return rot_z(deg2rad(z_deg)) * rot_y(deg2rad(y_deg)) * rot_x(deg2rad(x_deg));
}

RigidTransform random_rigid(Rng& rng, Interval euler_range_deg, Interval trans_range) {
  if (euler_range_deg.hi < euler_range_deg.lo || trans_range.hi < trans_range.lo) {
    throw InvalidInput("random_rigid: empty range");
  }
  auto draw = [&rng](Interval r) {
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  const double ax = draw(euler_range_deg);
  const double ay = draw(euler_range_deg);
  const double az = draw(euler_range_deg);
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = draw(trans_range);
  return RigidTransform::unchecked(euler_xyz_deg(ax, ay, az), t);
}

Vec3 centroid(std::span<const Vec3> points) {
  if (points.empty()) throw InvalidInput("centroid of an empty cloud");
  Vec3 m;
  for (int k = 0; k < 3; ++k) {
    ExactSum acc;
    for (const Vec3& p : points) acc.add(p[k]);
    m[k] = acc.value() / static_cast<double>(points.size());
  }
  return m;
}

Normalized normalize_unit_sphere(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidInput("normalize_unit_sphere: empty cloud");
  const Vec3 center = centroid(cloud.points());
  double scale = 0.0;
  for (const Vec3& p : cloud.points()) scale = std::max(scale, (p - center).norm());
  if (!(scale > 0.0)) scale = 1.0;
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back((p - center) / scale);
  return {cloud.with_points(std::move(out)), scale, center};
}

}  // namespace umereg
