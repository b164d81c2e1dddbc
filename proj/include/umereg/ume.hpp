#pragma once

#include "umereg/geom.hpp"

#include <Eigen/Core>

#include <vector>

namespace umereg {

using Matrix = Eigen::MatrixXd;

/// N x K matrix of per-point invariant feature values, rows aligned with the
/// cloud's point order.
class FeatureValues {
 public:
  FeatureValues() = default;
  explicit FeatureValues(Matrix values);

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index channels() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(Eigen::Index row, Eigen::Index channel) const { return values_(row, channel); }

 private:
  Matrix values_;
};

/// Family of D scalar weight functions w_j with w_j(0) = 0.
class WeightBank {
 public:
  enum class Kind { QuantileBins, Power };

  /// Indicator of (edges[j-1], edges[j]] for j = 1..D. Edges must be strictly
  /// increasing with edges[0] > 0.
  static WeightBank bins(std::vector<double> edges);
  /// w_j(x) = x^exponents[j]; exponents >= 1.
  static WeightBank power(std::vector<double> exponents);
  static WeightBank power(int channels);

  /// Bins at evenly spaced percentiles of the pooled values of both inputs.
  /// The lowest edge is the positive floor `min_edge`, the highest the pooled
  /// maximum. Interior edges snap to the widest nearby gap between pooled
  /// values; coincident edges are nudged upward so the result is strictly
  /// increasing (the affected bins stay empty).
  static WeightBank pooled_quantiles(std::span<const double> values1, std::span<const double> values2,
                                     int channels = 8, double min_edge = 1e-9);

  Kind kind() const noexcept { return kind_; }
  int channels() const noexcept { return static_cast<int>(kind_ == Kind::QuantileBins ? params_.size() - 1 : params_.size()); }
  const std::vector<double>& params() const noexcept { return params_; }

  double weight(int channel, double value) const;

 private:
  WeightBank(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}
  Kind kind_;
  std::vector<double> params_;
};

enum class Normalization { Sum, Mean };

/// 3 x D weighted first-moment matrix.
struct UmeMatrix {
  Eigen::Matrix<double, 3, Eigen::Dynamic> M;
  Normalization normalization = Normalization::Mean;
};

/// Distance of each point from the cloud's centroid (K = 1).
FeatureValues radial_feature(const PointCloud& cloud);

/// Channel j of the result holds w_j applied to the single input channel.
FeatureValues apply_weights(const FeatureValues& features, const WeightBank& bank);

UmeMatrix ume_matrix(const PointCloud& cloud, const FeatureValues& features,
                     Normalization normalization = Normalization::Mean);

/// Mean-normalized moment vector per feature channel.
std::vector<Vec3> moment_vectors(const PointCloud& cloud, const FeatureValues& features);

/// Continuous UME of the ball-indicator function built on the cloud
/// (f(x) = sum_p F(p) 1[x in B_eps(p)]), evaluated ball by ball with
/// Gauss-Legendre slice quadrature and divided by the ball volume. For
/// disjoint balls this equals the sum-normalized discrete UME matrix.
///
/// This overload treats each feature channel as its own invariant function
/// with identity weight. Throws PreconditionError if the balls intersect.
UmeMatrix epsball_oracle(const PointCloud& cloud, const FeatureValues& features, double eps);

/// Same, with the weight bank applied to f_eps(x) inside the integral; the
/// raw feature must have a single channel.
UmeMatrix epsball_oracle(const PointCloud& cloud, const FeatureValues& raw_feature,
                         const WeightBank& bank, double eps);

}  // namespace umereg
