#pragma once

#include "umereg/canon.hpp"
#include "umereg/geom.hpp"
#include "umereg/ume.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace umereg {

// Flag names attached to RegistrationResult / DegenerateGeometry.
inline constexpr const char* kFlagNearDegeneratePca = "near_degenerate_pca";
inline constexpr const char* kFlagDegeneratePca = "degenerate_pca";
inline constexpr const char* kFlagRankDeficientMoments = "rank_deficient_moments";
inline constexpr const char* kFlagHighResidual = "high_residual";
inline constexpr const char* kFlagEmptyBins = "empty_bins";
inline constexpr const char* kFlagIcpNotConverged = "icp_not_converged";

struct RegistrationResult {
  RigidTransform transform;
  int chosen_constellation = 0;
  /// Frobenius norm of M2 - R M1 over the mean-normalized moment matrices
  /// (for ICP: final root mean squared correspondence distance).
  double residual = 0.0;
  std::vector<std::string> degeneracy_flags;
  int iterations = 0;

  bool has_flag(const std::string& flag) const;
};

/// argmin_R sum_i w_i |v_i - R u_i|^2 over SO(3), via SVD of the weighted
/// cross-covariance with determinant correction.
///
/// Throws DegenerateCorrespondence when the cross-covariance has rank <= 1.
Mat3 horn_rotation(std::span<const Vec3> u, std::span<const Vec3> v,
                   std::optional<std::span<const double>> weights = std::nullopt);

inline Vec3 estimate_translation(const Mat3& R, const Vec3& m1, const Vec3& m2) { return m2 - R * m1; }

struct UmeConfig {
  enum class Bank { PooledQuantileBins, Power };
  Bank bank = Bank::PooledQuantileBins;
  int channels = 8;
};

/// Closed-form UME registration of P1 onto P2.
RegistrationResult register_ume(const PointCloud& p1, const PointCloud& p2, const UmeConfig& config = {});

/// Externally supplied resampled canonical coordinates plus K invariant
/// features per point.
struct UmefBundle {
  PointCloud coords;
  Matrix features;  // n x K
};

/// UME registration using bundle coordinates (expressed in each cloud's
/// canonical frame; cloud 2 in its disambiguated constellation) and bundle
/// features. Requires K >= 3.
RegistrationResult register_with_external(const PointCloud& p1, const PointCloud& p2, const UmefBundle& b1,
                                          const UmefBundle& b2);

/// Canonical frames as register_with_external sees them: frame of P1 and the
/// disambiguated constellation of P2's frame.
struct CanonicalPair {
  CanonicalFrame frame1;
  CanonicalFrame frame2;
  Disambiguation disambiguation;
};
CanonicalPair canonical_pair(const PointCloud& p1, const PointCloud& p2);

}  // namespace umereg
