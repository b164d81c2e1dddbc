#include "umereg/metrics.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"

#include <cmath>
#include <numbers>

namespace umereg {

Neighbor nearest_neighbor(const KdTree& index, const Vec3& query) {
  const auto hit = index.nearest(query);
  return {index.point(hit.index), hit.index, std::sqrt(hit.squared_distance)};
}

double directed_mean_distance(const PointCloud& from, const KdTree& to) {
  if (from.empty()) throw InvalidInput("directed distance from an empty cloud");
  ExactSum acc;
  for (const Vec3& p : from.points()) acc.add(std::sqrt(to.nearest(p).squared_distance));
  return acc.value() / static_cast<double>(from.size());
}

double directed_max_distance(const PointCloud& from, const KdTree& to) {
  if (from.empty()) throw InvalidInput("directed distance from an empty cloud");
  double worst = 0.0;
  for (const Vec3& p : from.points()) worst = std::max(worst, to.nearest(p).squared_distance);
  return std::sqrt(worst);
}

double chamfer(const PointCloud& p1, const PointCloud& p2) {
  if (p1.empty() || p2.empty()) throw InvalidInput("chamfer: empty cloud");
  const KdTree t1(p1), t2(p2);
  return directed_mean_distance(p1, t2) + directed_mean_distance(p2, t1);
}

double hausdorff(const PointCloud& p1, const PointCloud& p2) {
  if (p1.empty() || p2.empty()) throw InvalidInput("hausdorff: empty cloud");
  const KdTree t1(p1), t2(p2);
  return directed_max_distance(p1, t2) + directed_max_distance(p2, t1);
}

namespace {
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }
}  // namespace

// R = Rz(c) Ry(b) Rx(a):
//   R20 = -sin b, R21 = cos b sin a, R22 = cos b cos a, R10 = sin c cos b, R00 = cos c cos b.
EulerAngles to_euler_xyz_deg(const Mat3& R) {
  EulerAngles out;
  const double sb = std::clamp(-R(2, 0), -1.0, 1.0);
  const double cb = std::sqrt(R(0, 0) * R(0, 0) + R(1, 0) * R(1, 0));
  if (cb >= 1e-9) {
    out.deg = {rad2deg(std::atan2(R(2, 1), R(2, 2))), rad2deg(std::atan2(sb, cb)), rad2deg(std::atan2(R(1, 0), R(0, 0)))};
    return out;
  }
  // Gimbal lock: only a -/+ c is determined; pin c = 0.
  out.gimbal = true;
  const double b = sb > 0 ? 90.0 : -90.0;
  out.deg = {rad2deg(std::atan2(-R(1, 2), R(1, 1))), b, 0.0};
  return out;
}

double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

RotationError rotation_error(const Mat3& R_gt, const Mat3& R_pred) {
  const EulerAngles gt = to_euler_xyz_deg(R_gt);
  const EulerAngles pred = to_euler_xyz_deg(R_pred);
  RotationError err;
  for (int k = 0; k < 3; ++k) err.diff_deg[k] = wrap_deg(gt.deg[k] - pred.deg[k]);
  err.rmse_deg = std::sqrt(err.squared_sum() / 3.0);
  err.gimbal = gt.gimbal || pred.gimbal;
  return err;
}

double pooled_rmse_rotation(std::span<const RotationError> errors) {
  if (errors.empty()) return 0.0;
  ExactSum acc;
  for (const auto& e : errors) {
    for (double d : e.diff_deg) acc.add(d * d);
  }
  return std::sqrt(acc.value() / (3.0 * static_cast<double>(errors.size())));
}

double pooled_rmse_translation(std::span<const double> errors) {
  if (errors.empty()) return 0.0;
  ExactSum acc;
  for (double e : errors) acc.add(e * e);
  return std::sqrt(acc.value() / static_cast<double>(errors.size()));
}

MetricsRow aggregate(std::string method, std::string scenario, std::vector<TrialMetrics> trials) {
  MetricsRow row;
  row.method = std::move(method);
  row.scenario = std::move(scenario);
  row.trials = trials.size();
  ExactSum chamfer_sum, hausdorff_sum;
  std::vector<RotationError> rot;
  std::vector<double> trans;
  for (const auto& t : trials) {
    if (!t.ok) {
      ++row.failures;
      continue;
    }
    chamfer_sum.add(t.chamfer);
    hausdorff_sum.add(t.hausdorff);
    rot.push_back(t.rotation);
    trans.push_back(t.translation_error);
  }
  const std::size_t ok = row.trials - row.failures;
  if (ok > 0) {
    row.chamfer = chamfer_sum.value() / static_cast<double>(ok);
    row.hausdorff = hausdorff_sum.value() / static_cast<double>(ok);
    row.rmse_rotation_deg = pooled_rmse_rotation(rot);
    row.rmse_translation = pooled_rmse_translation(trans);
  }
  row.per_trial = std::move(trials);
  return row;
}

}  // namespace umereg
