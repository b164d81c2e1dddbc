#pragma once

// Brute-force reference computations and random generators for tests. These
// deliberately avoid the library's kd-tree, exact summation and Euler code.

#include "umereg/geom.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace umereg::testing {

inline std::vector<Vec3> random_points(Rng& rng, std::size_t n, const Vec3& extent = Vec3(3.0, 2.0, 1.0)) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng) * extent[0], u(rng) * extent[1], u(rng) * extent[2]);
  return pts;
}

inline PointCloud random_cloud(Rng& rng, std::size_t n, const Vec3& extent = Vec3(3.0, 2.0, 1.0)) {
  return with_sequential_ids(random_points(rng, n, extent));
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
inline Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Mat3 axis_angle(const Vec3& axis, double rad) { return Eigen::AngleAxisd(rad, axis.normalized()).toRotationMatrix(); }

inline double brute_min_distance(const Vec3& q, const std::vector<Vec3>& pts, std::size_t* arg = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = q[0] - pts[i][0], dy = q[1] - pts[i][1], dz = q[2] - pts[i][2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) {
      best = d2;
      if (arg) *arg = i;
    }
  }
  return std::sqrt(best);
}

inline std::vector<Vec3> as_vector(const PointCloud& c) { return {c.points().begin(), c.points().end()}; }

inline double brute_chamfer(const PointCloud& a, const PointCloud& b) {
  const auto pa = as_vector(a), pb = as_vector(b);
  double s1 = 0.0, s2 = 0.0;
  for (const auto& p : pa) s1 += brute_min_distance(p, pb);
  for (const auto& p : pb) s2 += brute_min_distance(p, pa);
  return s1 / pa.size() + s2 / pb.size();
}

inline double brute_hausdorff(const PointCloud& a, const PointCloud& b) {
  const auto pa = as_vector(a), pb = as_vector(b);
  double m1 = 0.0, m2 = 0.0;
  for (const auto& p : pa) m1 = std::max(m1, brute_min_distance(p, pb));
  for (const auto& p : pb) m2 = std::max(m2, brute_min_distance(p, pa));
  return m1 + m2;
}

/// sum_p p_i * F[p][j], plain left-to-right loop.
inline Eigen::MatrixXd brute_ume_sum(const PointCloud& cloud, const Eigen::MatrixXd& F) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, F.cols());
  for (Eigen::Index j = 0; j < F.cols(); ++j)
    for (int i = 0; i < 3; ++i)
      for (std::size_t p = 0; p < cloud.size(); ++p) M(i, j) += cloud[p][i] * F(static_cast<Eigen::Index>(p), j);
  return M;
}

inline Mat3 brute_covariance(const PointCloud& cloud) {
  Mat3 H = Mat3::Zero();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (const Vec3& p : cloud.points()) H(r, c) += p[r] * p[c];
  return H;
}

inline PointCloud rotate(const PointCloud& cloud, const Mat3& R, const Vec3& t = Vec3::Zero()) {
  std::vector<Vec3> out;
  for (const Vec3& p : cloud.points()) out.push_back(R * p + t);
  return cloud.with_points(out);
}

}  // namespace umereg::testing
