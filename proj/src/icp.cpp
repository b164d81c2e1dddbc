#include "umereg/icp.hpp"

#include "umereg/errors.hpp"
#include "umereg/exact_sum.hpp"
#include "umereg/kdtree.hpp"

#include <cmath>

namespace umereg {

namespace {

struct Matching {
  std::vector<std::size_t> target;
  double mse = 0.0;
};

Matching match(std::span<const Vec3> moved, const KdTree& tree) {
  Matching m;
  m.target.reserve(moved.size());
  ExactSum acc;
  for (const Vec3& p : moved) {
    const auto hit = tree.nearest(p);
    m.target.push_back(hit.index);
    acc.add(hit.squared_distance);
  }
  m.mse = acc.value() / static_cast<double>(moved.size());
  return m;
}

std::vector<Vec3> move_points(const PointCloud& cloud, const RigidTransform& T) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back(T(p));
  return out;
}

}  // namespace

RegistrationResult icp(const PointCloud& p1, const PointCloud& p2, const IcpConfig& config, IcpTrace* trace) {
  if (p1.empty() || p2.empty()) throw InvalidInput("icp: empty cloud");
  if (config.max_iterations < 1) throw ConfigError("icp: max_iterations must be >= 1");
  if (!(config.convergence_tol > 0.0)) throw ConfigError("icp: convergence_tol must be positive");

  const KdTree tree(p2);
  RigidTransform T = config.init;
  std::vector<Vec3> moved = move_points(p1, T);
  Matching current = match(moved, tree);
  if (trace) trace->mse.assign(1, current.mse);

  RegistrationResult result;
  bool converged = false;
  int it = 0;
  while (it < config.max_iterations) {
    ++it;
    std::vector<Vec3> targets;
    targets.reserve(moved.size());
    for (std::size_t idx : current.target) targets.push_back(p2[idx]);
    const Vec3 ms = centroid(moved);
    const Vec3 mt = centroid(targets);
    std::vector<Vec3> u, v;
    u.reserve(moved.size());
    v.reserve(moved.size());
    for (std::size_t i = 0; i < moved.size(); ++i) {
      u.push_back(moved[i] - ms);
      v.push_back(targets[i] - mt);
    }
    Mat3 dR;
    if (moved.size() < 3) {
      dR = Mat3::Identity();
    } else {
      dR = horn_rotation(u, v);
    }
    const RigidTransform step = RigidTransform::unchecked(dR, estimate_translation(dR, ms, mt));
    T = compose(step, T);
    moved = move_points(p1, T);
    const double previous = current.mse;
    current = match(moved, tree);
    if (trace) trace->mse.push_back(current.mse);
    if (std::abs(previous - current.mse) < config.convergence_tol) {
      converged = true;
      break;
    }
  }

  result.transform = T;
  result.iterations = it;
  result.residual = std::sqrt(current.mse);
  if (!converged) result.degeneracy_flags.emplace_back(kFlagIcpNotConverged);
  return result;
}

}  // namespace umereg
