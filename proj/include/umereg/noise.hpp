#pragma once

#include "umereg/geom.hpp"

#include <string>
#include <utility>
#include <variant>

namespace umereg {

namespace noise {
struct None {};
struct Bernoulli {
  double q1 = 0.5;
  double q2 = 0.5;
};
struct ZeroIntersection {};
struct Awgn {
  double sigma = 0.0;
};
}  // namespace noise

using NoiseSpec = std::variant<noise::None, noise::Bernoulli, noise::ZeroIntersection, noise::Awgn>;

/// Throws ConfigError on probabilities outside (0,1] or negative sigma.
void validate(const NoiseSpec& spec);

using CloudPair = std::pair<PointCloud, PointCloud>;

/// Keeps each point of P_i independently with probability q_i. Redraws the
/// whole pair if either output is empty, up to 100 attempts.
CloudPair bernoulli_noise(const PointCloud& p1, const PointCloud& p2, double q1, double q2, Rng& rng);

/// Splits a 2N-point corresponding pair into complementary halves: a uniform
/// random set S of N ids is kept in cloud 1, its complement in cloud 2.
/// Both parents must carry the same id set.
CloudPair zero_intersection(const PointCloud& parent1, const PointCloud& parent2, Rng& rng);

/// Independent N(0, sigma^2) perturbation of every coordinate; no clipping.
PointCloud awgn(const PointCloud& cloud, double sigma, Rng& rng);

/// Uniform random permutation of point order (ids move with their points).
PointCloud shuffle(const PointCloud& cloud, Rng& rng);

}  // namespace umereg
