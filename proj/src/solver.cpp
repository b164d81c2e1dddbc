#include "umereg/solver.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace umereg {

bool RegistrationResult::has_flag(const std::string& flag) const {
  return std::find(degeneracy_flags.begin(), degeneracy_flags.end(), flag) != degeneracy_flags.end();
}

namespace {

// Rank <= 1 when the second singular value is below both a relative and an
// absolute floor.
Mat3 horn_impl(std::span<const Vec3> u, std::span<const Vec3> v, std::optional<std::span<const double>> weights,
               double absolute_floor) {
  if (u.size() != v.size()) throw InvalidInput("horn_rotation: vector lists differ in length");
  if (u.size() < 3) throw InvalidInput("horn_rotation needs at least 3 vector pairs");
  if (weights && weights->size() != u.size()) throw InvalidInput("horn_rotation: weight count mismatch");

  Mat3 K = Mat3::Zero();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("horn_rotation: weights must be finite and non-negative");
    K += w * v[i] * u[i].transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] <= 1e-12 * s[0] || s[1] <= absolute_floor) {
    throw DegenerateCorrespondence("cross-covariance has rank <= 1", {kFlagRankDeficientMoments});
  }
  const Mat3& A = svd.matrixU();
  const Mat3& B = svd.matrixV();
  Vec3 d(1.0, 1.0, (A * B.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  return A * d.asDiagonal() * B.transpose();
}

PointCloud centered(const PointCloud& cloud, const Vec3& m) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back(p - m);
  return cloud.with_points(std::move(out));
}

double rms_radius(const PointCloud& centered_cloud) {
  ExactSum acc;
  for (const Vec3& p : centered_cloud.points()) acc.add(p.squaredNorm());
  return std::sqrt(acc.value() / static_cast<double>(centered_cloud.size()));
}

// Sum of |f| per channel; for indicator features this is the bin occupancy.
std::vector<double> channel_mass(const FeatureValues& f) {
  std::vector<double> mass(static_cast<std::size_t>(f.channels()));
  for (Eigen::Index j = 0; j < f.channels(); ++j) {
    ExactSum acc;
    for (Eigen::Index i = 0; i < f.rows(); ++i) acc.add(std::abs(f(i, j)));
    mass[static_cast<std::size_t>(j)] = acc.value();
  }
  return mass;
}

void add_flag(std::vector<std::string>& flags, const char* flag) {
  if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.emplace_back(flag);
}

// Horn over moment-vector pairs of the centered clouds, then translation from
// the original centroids.
RegistrationResult solve_moments(const PointCloud& c1, const PointCloud& c2, const FeatureValues& f1,
                                 const FeatureValues& f2, const std::vector<double>& weights, const Vec3& m1,
                                 const Vec3& m2, RegistrationResult result) {
  const UmeMatrix M1 = ume_matrix(c1, f1, Normalization::Mean);
  const UmeMatrix M2 = ume_matrix(c2, f2, Normalization::Mean);
  std::vector<Vec3> u, v;
  for (Eigen::Index j = 0; j < M1.M.cols(); ++j) {
    u.emplace_back(M1.M.col(j));
    v.emplace_back(M2.M.col(j));
  }

  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  const double floor = 1e-10 * total_weight * rms_radius(c1) * rms_radius(c2);
  Mat3 R;
  try {
    R = horn_impl(u, v, std::span<const double>(weights), floor);
  } catch (const DegenerateCorrespondence&) {
    auto flags = result.degeneracy_flags;
    add_flag(flags, kFlagRankDeficientMoments);
    throw DegenerateCorrespondence("moment vectors are rank deficient", flags);
  }

  result.transform = RigidTransform::unchecked(R, estimate_translation(R, m1, m2));
  result.residual = (M2.M - R * M1.M).norm();
  if (result.residual > 0.1 * M2.M.norm()) add_flag(result.degeneracy_flags, kFlagHighResidual);
  return result;
}

}  // namespace

Mat3 horn_rotation(std::span<const Vec3> u, std::span<const Vec3> v, std::optional<std::span<const double>> weights) {
  return horn_impl(u, v, weights, 0.0);
}

CanonicalPair canonical_pair(const PointCloud& p1, const PointCloud& p2) {
  CanonicalPair out;
  out.frame1 = pca_frame(p1);
  const CanonicalFrame base2 = pca_frame(p2);
  out.disambiguation = disambiguate(out.frame1, base2);
  out.frame2 = apply_constellation(base2, out.disambiguation.index);
  return out;
}

RegistrationResult register_ume(const PointCloud& p1, const PointCloud& p2, const UmeConfig& config) {
  if (p1.size() < 4 || p2.size() < 4) throw InvalidInput("register_ume needs at least 4 points per cloud");
  if (config.channels < 3) throw InsufficientFeatures("register_ume needs at least 3 weight channels");

  RegistrationResult result;
  const CanonicalPair pair = canonical_pair(p1, p2);
  result.chosen_constellation = pair.disambiguation.index;
  if (pair.frame1.near_degenerate || pair.frame2.near_degenerate) {
    add_flag(result.degeneracy_flags, kFlagNearDegeneratePca);
  }

  const Vec3& m1 = pair.frame1.centroid;
  const Vec3& m2 = pair.frame2.centroid;
  const PointCloud c1 = centered(p1, m1);
  const PointCloud c2 = centered(p2, m2);

  const FeatureValues r1 = radial_feature(p1);
  const FeatureValues r2 = radial_feature(p2);
  const WeightBank bank = config.bank == UmeConfig::Bank::Power
                              ? WeightBank::power(config.channels)
                              : WeightBank::pooled_quantiles(std::span(r1.values().data(), r1.values().size()),
                                                             std::span(r2.values().data(), r2.values().size()),
                                                             config.channels);
  const FeatureValues f1 = apply_weights(r1, bank);
  const FeatureValues f2 = apply_weights(r2, bank);

  std::vector<double> weights(static_cast<std::size_t>(bank.channels()), 1.0);
  if (bank.kind() == WeightBank::Kind::QuantileBins) {
    const auto n1 = channel_mass(f1), n2 = channel_mass(f2);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      weights[j] = std::min(n1[j], n2[j]);
      if (weights[j] == 0.0) add_flag(result.degeneracy_flags, kFlagEmptyBins);
    }
  }
  return solve_moments(c1, c2, f1, f2, weights, m1, m2, std::move(result));
}

RegistrationResult register_with_external(const PointCloud& p1, const PointCloud& p2, const UmefBundle& b1,
                                          const UmefBundle& b2) {
  if (b1.features.cols() != b2.features.cols()) throw InvalidInput("bundles carry different feature counts");
  if (b1.features.cols() < 3) throw InsufficientFeatures("external registration needs at least 3 feature channels");
  if (b1.coords.size() != p1.size() || b2.coords.size() != p2.size()) {
    throw InvalidInput("bundle point count does not match its cloud");
  }
  if (static_cast<std::size_t>(b1.features.rows()) != b1.coords.size() ||
      static_cast<std::size_t>(b2.features.rows()) != b2.coords.size()) {
    throw InvalidInput("bundle feature rows do not match bundle coordinates");
  }

  RegistrationResult result;
  const CanonicalPair pair = canonical_pair(p1, p2);
  result.chosen_constellation = pair.disambiguation.index;
  if (pair.frame1.near_degenerate || pair.frame2.near_degenerate) {
    add_flag(result.degeneracy_flags, kFlagNearDegeneratePca);
  }

  const PointCloud hat1 = reproject(pair.frame1, b1.coords);
  const PointCloud hat2 = reproject(pair.frame2, b2.coords);
  const PointCloud c1 = centered(hat1, centroid(hat1.points()));
  const PointCloud c2 = centered(hat2, centroid(hat2.points()));
  const FeatureValues f1(b1.features), f2(b2.features);

  const auto n1 = channel_mass(f1), n2 = channel_mass(f2);
  std::vector<double> weights(n1.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    weights[j] = std::min(n1[j], n2[j]);
    if (weights[j] == 0.0) add_flag(result.degeneracy_flags, kFlagEmptyBins);
  }
  return solve_moments(c1, c2, f1, f2, weights, pair.frame1.centroid, pair.frame2.centroid, std::move(result));
}

}  // namespace umereg
