#include "umereg/noise.hpp"

#include "umereg/errors.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace umereg {

void validate(const NoiseSpec& spec) {
  if (const auto* b = std::get_if<noise::Bernoulli>(&spec)) {
    if (!(b->q1 > 0.0 && b->q1 <= 1.0) || !(b->q2 > 0.0 && b->q2 <= 1.0)) {
      throw ConfigError("Bernoulli keep-probabilities must lie in (0, 1]");
    }
  } else if (const auto* a = std::get_if<noise::Awgn>(&spec)) {
    if (!(a->sigma >= 0.0)) throw ConfigError("AWGN sigma must be non-negative");
  }
}

namespace {

PointCloud keep_each(const PointCloud& cloud, double q, Rng& rng) {
  std::bernoulli_distribution keep(q);
  std::vector<std::size_t> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep(rng)) kept.push_back(i);
  }
  return cloud.select(kept);
}

}  // namespace

CloudPair bernoulli_noise(const PointCloud& p1, const PointCloud& p2, double q1, double q2, Rng& rng) {
  validate(noise::Bernoulli{q1, q2});
  if (p1.empty() || p2.empty()) throw InvalidInput("bernoulli_noise: empty input cloud");
  for (int attempt = 0; attempt < 100; ++attempt) {
    PointCloud a = keep_each(p1, q1, rng);
    PointCloud b = keep_each(p2, q2, rng);
    if (!a.empty() && !b.empty()) return {std::move(a), std::move(b)};
  }
  throw ResampleExhausted("bernoulli_noise produced an empty cloud 100 times in a row");
}

CloudPair zero_intersection(const PointCloud& parent1, const PointCloud& parent2, Rng& rng) {
  if (!parent1.has_ids() || !parent2.has_ids()) throw InvalidInput("zero_intersection needs correspondence ids");
  if (parent1.size() != parent2.size()) throw InvalidInput("zero_intersection: parents differ in size");
  if (parent1.size() % 2 != 0) throw InvalidInput("zero_intersection needs an even parent size");
  {
    const auto ids1 = parent1.ids();
    const std::unordered_set<PointId> set1(ids1.begin(), ids1.end());
    for (PointId id : parent2.ids()) {
      if (!set1.contains(id)) throw InvalidInput("zero_intersection: parents carry different id sets");
    }
  }

  // Uniform N-subset of parent1's positions via a shuffled index list.
  std::vector<std::size_t> order(parent1.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t half = parent1.size() / 2;
  std::vector<std::size_t> keep1(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  std::sort(keep1.begin(), keep1.end());

  std::unordered_set<PointId> chosen;
  chosen.reserve(half);
  for (std::size_t i : keep1) chosen.insert(parent1.ids()[i]);

  std::vector<std::size_t> keep2;
  keep2.reserve(half);
  for (std::size_t i = 0; i < parent2.size(); ++i) {
    if (!chosen.contains(parent2.ids()[i])) keep2.push_back(i);
  }
  return {parent1.select(keep1), parent2.select(keep2)};
}

PointCloud awgn(const PointCloud& cloud, double sigma, Rng& rng) {
  validate(noise::Awgn{sigma});
  if (sigma == 0.0) return cloud;
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) {
    Vec3 q = p;
    for (int k = 0; k < 3; ++k) q[k] += gauss(rng);
    out.push_back(q);
  }
  return cloud.with_points(std::move(out));
}

PointCloud shuffle(const PointCloud& cloud, Rng& rng) {
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return cloud.select(order);
}

}  // namespace umereg
