#include "umereg/ume.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace umereg {

FeatureValues::FeatureValues(Matrix values) : values_(std::move(values)) {
  if (values_.cols() < 1) throw InvalidInput("feature values need at least one channel");
  if (!values_.allFinite()) throw InvalidInput("feature values must be finite");
}

WeightBank WeightBank::bins(std::vector<double> edges) {
  if (edges.size() < 2) throw ConfigError("bin bank needs at least two edges");
  if (!(edges.front() > 0.0)) throw ConfigError("lowest bin edge must be positive so that w(0) = 0");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!std::isfinite(edges[k])) throw ConfigError("bin edges must be finite");
    if (k > 0 && !(edges[k] > edges[k - 1])) throw ConfigError("bin edges must be strictly increasing");
  }
  return WeightBank(Kind::QuantileBins, std::move(edges));
}

WeightBank WeightBank::power(std::vector<double> exponents) {
  if (exponents.empty()) throw ConfigError("power bank needs at least one exponent");
  for (double e : exponents) {
    if (!(e >= 1.0) || !std::isfinite(e)) throw ConfigError("power exponents must be >= 1");
  }
  return WeightBank(Kind::Power, std::move(exponents));
}

WeightBank WeightBank::power(int channels) {
  std::vector<double> e(static_cast<std::size_t>(std::max(channels, 0)));
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = static_cast<double>(k + 1);
  return power(std::move(e));
}

WeightBank WeightBank::pooled_quantiles(std::span<const double> values1, std::span<const double> values2, int channels,
                                        double min_edge) {
  if (channels < 1) throw ConfigError("quantile bank needs at least one channel");
  std::vector<double> pooled(values1.begin(), values1.end());
  pooled.insert(pooled.end(), values2.begin(), values2.end());
  if (pooled.empty()) throw InvalidInput("quantile bank over no values");
  std::sort(pooled.begin(), pooled.end());

  const auto n = pooled.size();
  // Interior edges sit at the midpoint of the widest gap between consecutive
  // pooled values within a small window around the quantile position, so an
  // edge never coincides with a data value and near-duplicate radii (a value
  // and its rotated copy) always share a bin.
  const std::size_t window = std::max<std::size_t>(2, n / 200);
  std::vector<double> edges(static_cast<std::size_t>(channels) + 1);
  edges[0] = min_edge;
  for (int k = 1; k <= channels; ++k) {
    double e = pooled.back();
    if (k < channels && n >= 2) {
      const auto pos = static_cast<std::size_t>(std::floor(static_cast<double>(k) / channels * static_cast<double>(n - 1)));
      const std::size_t lo = pos > window ? pos - window : 0;
      const std::size_t hi = std::min(pos + window, n - 2);
      std::size_t best = lo;
      for (std::size_t i = lo; i <= hi; ++i) {
        if (pooled[i + 1] - pooled[i] > pooled[best + 1] - pooled[best]) best = i;
      }
      e = 0.5 * (pooled[best] + pooled[best + 1]);
    }
    edges[k] = e > edges[k - 1] ? e : std::nextafter(edges[k - 1], std::numeric_limits<double>::infinity());
  }
  return bins(std::move(edges));
}

double WeightBank::weight(int channel, double value) const {
  const auto j = static_cast<std::size_t>(channel);
  if (kind_ == Kind::QuantileBins) return (value > params_[j] && value <= params_[j + 1]) ? 1.0 : 0.0;
  return std::pow(value, params_[j]);
}

FeatureValues radial_feature(const PointCloud& cloud) {
  const Vec3 m = centroid(cloud.points());
  Matrix v(static_cast<Eigen::Index>(cloud.size()), 1);
  for (std::size_t i = 0; i < cloud.size(); ++i) v(static_cast<Eigen::Index>(i), 0) = (cloud[i] - m).norm();
  return FeatureValues(std::move(v));
}

FeatureValues apply_weights(const FeatureValues& features, const WeightBank& bank) {
  if (features.channels() != 1) throw InvalidInput("apply_weights expects a single feature channel");
  const int D = bank.channels();
  Matrix out(features.rows(), D);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (int j = 0; j < D; ++j) out(i, j) = bank.weight(j, features(i, 0));
  }
  return FeatureValues(std::move(out));
}

UmeMatrix ume_matrix(const PointCloud& cloud, const FeatureValues& features, Normalization normalization) {
  if (static_cast<std::size_t>(features.rows()) != cloud.size()) {
    throw InvalidInput("feature rows (" + std::to_string(features.rows()) + ") do not match point count (" +
                       std::to_string(cloud.size()) + ")");
  }
  if (cloud.empty()) throw InvalidInput("ume_matrix of an empty cloud");
  const Eigen::Index D = features.channels();
  UmeMatrix out;
  out.normalization = normalization;
  out.M.resize(3, D);
  const double n = static_cast<double>(cloud.size());
  for (Eigen::Index j = 0; j < D; ++j) {
    for (int i = 0; i < 3; ++i) {
      ExactSum acc;
      for (std::size_t p = 0; p < cloud.size(); ++p) acc.add(cloud[p][i] * features(static_cast<Eigen::Index>(p), j));
      out.M(i, j) = normalization == Normalization::Mean ? acc.value() / n : acc.value();
    }
  }
  return out;
}

std::vector<Vec3> moment_vectors(const PointCloud& cloud, const FeatureValues& features) {
  const UmeMatrix u = ume_matrix(cloud, features, Normalization::Mean);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(u.M.cols()));
  for (Eigen::Index j = 0; j < u.M.cols(); ++j) out.emplace_back(u.M.col(j));
  return out;
}

namespace {

void check_disjoint_balls(const PointCloud& cloud, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  for (std::size_t a = 0; a < cloud.size(); ++a) {
    for (std::size_t b = a + 1; b < cloud.size(); ++b) {
      if (!(eps < 0.5 * (cloud[a] - cloud[b]).norm())) {
        throw PreconditionError("eps-balls intersect: eps must be below half the minimum pairwise distance");
      }
    }
  }
}

// Three-point Gauss-Legendre on [-1, 1]; exact for the cubic slice integrands.
constexpr double kGlNode = 0.7745966692414833770;  // sqrt(3/5)
constexpr std::array<double, 3> kGlNodes{-kGlNode, 0.0, kGlNode};
constexpr std::array<double, 3> kGlWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// f_eps at x for channel k: sum of F(p) over balls containing x.
double ball_function(const PointCloud& cloud, const FeatureValues& raw, Eigen::Index k, const Vec3& x, double eps) {
  double f = 0.0;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    if ((x - cloud[p]).norm() < eps) f += raw(static_cast<Eigen::Index>(p), k);
  }
  return f;
}

template <class Weight>
UmeMatrix ball_integrals(const PointCloud& cloud, const FeatureValues& raw, int channels, double eps, Weight&& w) {
  if (static_cast<std::size_t>(raw.rows()) != cloud.size()) throw InvalidInput("feature rows do not match point count");
  check_disjoint_balls(cloud, eps);
  const double volume = 4.0 / 3.0 * std::numbers::pi * eps * eps * eps;
  UmeMatrix out;
  out.normalization = Normalization::Sum;
  out.M = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, channels);
  // Outside every ball f_eps = 0 and w(0) = 0, so only the balls contribute.
  // Slicing ball B_eps(v) orthogonally to axis i gives disks of area
  // pi (eps^2 - s^2) on which x_i = v_i + s and f_eps is constant.
  for (const Vec3& v : cloud.points()) {
    for (int i = 0; i < 3; ++i) {
      for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
        const double s = eps * kGlNodes[q];
        Vec3 x = v;
        x[i] += s;
        const double slice = kGlWeights[q] * eps * (v[i] + s) * std::numbers::pi * (eps * eps - s * s);
        const Eigen::VectorXd weighted = w(x);
        for (int j = 0; j < channels; ++j) out.M(i, j) += slice * weighted[j];
      }
    }
  }
  out.M /= volume;
  return out;
}

}  // namespace

UmeMatrix epsball_oracle(const PointCloud& cloud, const FeatureValues& features, double eps) {
  const auto K = features.channels();
  return ball_integrals(cloud, features, static_cast<int>(K), eps, [&](const Vec3& x) {
    Eigen::VectorXd f(K);
    for (Eigen::Index k = 0; k < K; ++k) f[k] = ball_function(cloud, features, k, x, eps);
    return f;
  });
}

UmeMatrix epsball_oracle(const PointCloud& cloud, const FeatureValues& raw_feature, const WeightBank& bank,
                         double eps) {
  if (raw_feature.channels() != 1) throw InvalidInput("epsball_oracle with a bank expects one raw channel");
  if (bank.weight(0, 0.0) != 0.0) throw ConfigError("weight bank violates w(0) = 0");
  const int D = bank.channels();
  return ball_integrals(cloud, raw_feature, D, eps, [&](const Vec3& x) {
    const double f = ball_function(cloud, raw_feature, 0, x, eps);
    Eigen::VectorXd w(D);
    for (int j = 0; j < D; ++j) w[j] = bank.weight(j, f);
    return w;
  });
}

}  // namespace umereg
