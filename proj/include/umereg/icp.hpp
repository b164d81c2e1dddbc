#pragma once

#include "umereg/geom.hpp"
#include "umereg/solver.hpp"

#include <vector>

namespace umereg {

struct IcpConfig {
  int max_iterations = 100;
  double convergence_tol = 1e-8;
  RigidTransform init;
};

/// Per-iteration mean squared correspondence error, recorded for inspection.
struct IcpTrace {
  std::vector<double> mse;
};

/// Point-to-point ICP aligning P1 onto P2.
RegistrationResult icp(const PointCloud& p1, const PointCloud& p2, const IcpConfig& config = {},
                       IcpTrace* trace = nullptr);

}  // namespace umereg
