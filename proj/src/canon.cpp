#include "umereg/canon.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"
#include "umereg/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace umereg {

SymmetricEigen jacobi_eigen(const Mat3& symmetric, double tol, int max_sweeps) {
  Mat3 a = 0.5 * (symmetric + symmetric.transpose());
  Mat3 v = Mat3::Identity();
  const double scale = a.norm();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    const double off = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
    if (off <= tol * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 J = Mat3::Identity();
        J(p, p) = c;
        J(q, q) = c;
        J(p, q) = s;
        J(q, p) = -s;
        a = J.transpose() * a * J;
        a(p, q) = a(q, p) = 0.0;
        v = v * J;
      }
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&a](int i, int j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

Mat3 covariance(const PointCloud& centered_cloud) {
  if (centered_cloud.empty()) throw InvalidInput("covariance of an empty cloud");
  Mat3 H;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) {
      ExactSum acc;
      for (const Vec3& p : centered_cloud.points()) acc.add(p[r] * p[c]);
      H(r, c) = H(c, r) = acc.value();
    }
  }
  return H;
}

namespace {

// Largest-magnitude entry positive; the first such entry wins ties.
void fix_column_signs(Mat3& axes) {
  for (int c = 0; c < 3; ++c) {
    int arg = 0;
    for (int r = 1; r < 3; ++r) {
      if (std::abs(axes(r, c)) > std::abs(axes(arg, c))) arg = r;
    }
    if (axes(arg, c) < 0.0) axes.col(c) = -axes.col(c);
  }
}

}  // namespace

CanonicalFrame pca_frame(const PointCloud& cloud) {
  if (cloud.size() < 3) throw DegenerateGeometry("pca_frame needs at least 3 points", {"degenerate_pca"});
  CanonicalFrame frame;
  frame.centroid = centroid(cloud.points());

  std::vector<Vec3> centered;
  centered.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) centered.push_back(p - frame.centroid);

  const SymmetricEigen eig = jacobi_eigen(covariance(PointCloud(centered)));
  const double top = eig.values[0];
  if (!(top > 0.0) || eig.values[1] <= 1e-12 * top) {
    throw DegenerateGeometry("covariance is rank deficient (collinear or coincident points)", {"degenerate_pca"});
  }
  for (int k = 0; k < 3; ++k) frame.eigenvalues[k] = std::max(0.0, eig.values[k]);
  frame.near_degenerate = (frame.eigenvalues[0] - frame.eigenvalues[1]) < 1e-6 * top ||
                          (frame.eigenvalues[1] - frame.eigenvalues[2]) < 1e-6 * top;

  frame.axes = eig.vectors;
  fix_column_signs(frame.axes);

  const Mat3 Dt = frame.axes.transpose();
  for (Vec3& p : centered) p = Dt * p;
  frame.coords = cloud.with_points(std::move(centered));
  return frame;
}

double constellation_sign(int index, int col) { return ((index >> (2 - col)) & 1) ? -1.0 : 1.0; }

CanonicalFrame apply_constellation(const CanonicalFrame& frame, int index) {
  const Vec3 s(constellation_sign(index, 0), constellation_sign(index, 1), constellation_sign(index, 2));
  CanonicalFrame out = frame;
  for (int c = 0; c < 3; ++c) out.axes.col(c) *= s[c];
  std::vector<Vec3> coords;
  coords.reserve(frame.coords.size());
  for (const Vec3& c : frame.coords.points()) coords.push_back(s.cwiseProduct(c));
  out.coords = frame.coords.with_points(std::move(coords));
  return out;
}

std::array<CanonicalFrame, 8> sign_constellations(const CanonicalFrame& frame) {
  std::array<CanonicalFrame, 8> out;
  for (int j = 0; j < 8; ++j) out[j] = apply_constellation(frame, j);
  return out;
}

namespace {

// Mean distance from each sign-flipped query point to its nearest indexed point.
double directed_mean(std::span<const Vec3> queries, const Vec3& signs, const KdTree& tree) {
  ExactSum acc;
  for (const Vec3& q : queries) acc.add(std::sqrt(tree.nearest(signs.cwiseProduct(q)).squared_distance));
  return acc.value() / static_cast<double>(queries.size());
}

}  // namespace

Disambiguation disambiguate(const CanonicalFrame& frame1, const CanonicalFrame& frame2) {
  if (frame1.coords.empty() || frame2.coords.empty()) throw InvalidInput("disambiguate: empty frame");
  // d(c1, S c2) = d(S c1, c2) exactly, so both trees are built once.
  const KdTree tree1(frame1.coords);
  const KdTree tree2(frame2.coords);
  Disambiguation out;
  out.chamfer = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 8; ++j) {
    const Vec3 s(constellation_sign(j, 0), constellation_sign(j, 1), constellation_sign(j, 2));
    const double d = directed_mean(frame1.coords.points(), s, tree2) + directed_mean(frame2.coords.points(), s, tree1);
    out.all[j] = d;
    if (d < out.chamfer) {
      out.chamfer = d;
      out.index = j;
    }
  }
  return out;
}

PointCloud reproject(const CanonicalFrame& frame, const PointCloud& coords) {
  std::vector<Vec3> out;
  out.reserve(coords.size());
  for (const Vec3& c : coords.points()) out.push_back(frame.axes * c + frame.centroid);
  return coords.with_points(std::move(out));
}

}  // namespace umereg
