#pragma once

#include "umereg/geom.hpp"

#include <array>

namespace umereg {

/// PCA coordinate system of one cloud.
///
/// `axes` holds the principal directions as columns, in descending
/// eigenvalue order; `coords` holds axes^T (p - centroid) for every input
/// point, in input order (ids carried over).
struct CanonicalFrame {
  Vec3 centroid = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 eigenvalues = Vec3::Zero();
  PointCloud coords;
  /// Set when two eigenvalues are within a relative gap of 1e-6; the axes
  /// are then not stable under small perturbations.
  bool near_degenerate = false;
};

struct SymmetricEigen {
  Vec3 values;   // descending
  Mat3 vectors;  // columns, matching `values`
  int sweeps = 0;
};

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 matrix.
SymmetricEigen jacobi_eigen(const Mat3& symmetric, double tol = 1e-14, int max_sweeps = 50);

/// Unnormalized scatter sum of p p^T. The caller removes the centroid.
Mat3 covariance(const PointCloud& centered_cloud);

/// Throws DegenerateGeometry for collinear or coincident clouds.
CanonicalFrame pca_frame(const PointCloud& cloud);

/// Sign of axis column `col` in constellation `index` (0..7). Index bits
/// count in binary with the first column as the most significant bit, so the
/// order is +++, ++-, +-+, +--, -++, ...
double constellation_sign(int index, int col);

/// The frame with its axis columns multiplied by constellation `index` signs.
CanonicalFrame apply_constellation(const CanonicalFrame& frame, int index);

std::array<CanonicalFrame, 8> sign_constellations(const CanonicalFrame& frame);

struct Disambiguation {
  int index = 0;
  double chamfer = 0.0;
  std::array<double, 8> all{};
};

/// Picks the sign constellation of frame2 whose coordinates are closest to
/// frame1's in Chamfer distance. Lowest index wins ties.
Disambiguation disambiguate(const CanonicalFrame& frame1, const CanonicalFrame& frame2);

/// Maps frame coordinates back to world: axes * c + centroid.
PointCloud reproject(const CanonicalFrame& frame, const PointCloud& coords);

}  // namespace umereg
