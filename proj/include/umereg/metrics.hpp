#pragma once

#include "umereg/geom.hpp"
#include "umereg/kdtree.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace umereg {

/// Nearest indexed point to `query` and its Euclidean distance.
struct Neighbor {
  Vec3 point;
  std::size_t index;
  double distance;
};
Neighbor nearest_neighbor(const KdTree& index, const Vec3& query);

/// Mean nearest-neighbour distance from `from` to `to` (not squared).
double directed_mean_distance(const PointCloud& from, const KdTree& to);
double directed_max_distance(const PointCloud& from, const KdTree& to);

/// Sum of the two directed mean nearest-neighbour distances.
double chamfer(const PointCloud& p1, const PointCloud& p2);
/// Sum of the two directed maximal nearest-neighbour distances.
double hausdorff(const PointCloud& p1, const PointCloud& p2);

struct EulerAngles {
  std::array<double, 3> deg;  // about x, y, z (extrinsic XYZ)
  bool gimbal = false;
};

/// Inverse of euler_xyz_deg. At gimbal lock (|cos pitch| < 1e-9) the
/// z angle is set to 0 and the flag raised.
EulerAngles to_euler_xyz_deg(const Mat3& R);

/// Wraps into (-180, 180].
double wrap_deg(double deg);

struct RotationError {
  std::array<double, 3> diff_deg{};  // wrapped per-angle differences
  double rmse_deg = 0.0;
  bool gimbal = false;

  double squared_sum() const { return diff_deg[0] * diff_deg[0] + diff_deg[1] * diff_deg[1] + diff_deg[2] * diff_deg[2]; }
};

RotationError rotation_error(const Mat3& R_gt, const Mat3& R_pred);
inline double rmse_rotation(const Mat3& R_gt, const Mat3& R_pred) { return rotation_error(R_gt, R_pred).rmse_deg; }
inline double rmse_translation(const Vec3& t_gt, const Vec3& t_pred) { return (t_gt - t_pred).norm(); }

/// Dataset-level pooling: square every angle error, average over all trials
/// and angles, then take the root.
double pooled_rmse_rotation(std::span<const RotationError> errors);
/// Root of the mean squared translation error norms.
double pooled_rmse_translation(std::span<const double> errors);

struct TrialMetrics {
  std::size_t trial = 0;
  bool ok = false;
  std::string error;
  double chamfer = 0.0;
  double hausdorff = 0.0;
  RotationError rotation;
  double translation_error = 0.0;
};

struct MetricsRow {
  std::string method;
  std::string scenario;
  double chamfer = 0.0;
  double hausdorff = 0.0;
  double rmse_rotation_deg = 0.0;
  double rmse_translation = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<TrialMetrics> per_trial;
};

/// Aggregated results, one row per (method, scenario).
struct MetricsReport {
  std::vector<MetricsRow> rows;
};

/// Aggregates over successful trials: mean chamfer and hausdorff, pooled
/// rotation and translation RMSE.
MetricsRow aggregate(std::string method, std::string scenario, std::vector<TrialMetrics> trials);

}  // namespace umereg
