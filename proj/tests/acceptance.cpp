// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "support/oracles.hpp"
#include "umereg/bench.hpp"
#include "umereg/canon.hpp"
#include "umereg/kdtree.hpp"
#include "umereg/metrics.hpp"
#include "umereg/noise.hpp"
#include "umereg/solver.hpp"
#include "umereg/ume.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace umereg;
using namespace umereg::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget " + std::to_string(budget_s) + " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::span<const double> col0(const FeatureValues& f) { return {f.values().data(), static_cast<std::size_t>(f.rows())}; }

Outcome moment_covariance() {
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const PointCloud p = random_cloud(rng, 256);
    const Mat3 R = random_rotation(rng);
    const PointCloud q = shuffle(rotate(p, R), rng);
    const FeatureValues r1 = radial_feature(p), r2 = radial_feature(q);
    const WeightBank bank = WeightBank::pooled_quantiles(col0(r1), col0(r2), 8);
    const auto m1 = moment_vectors(p, apply_weights(r1, bank));
    const auto m2 = moment_vectors(q, apply_weights(r2, bank));
    for (std::size_t j = 0; j < m1.size(); ++j) worst = std::max(worst, (m2[j] - R * m1[j]).norm());
  }
  return {worst < 1e-9, "1000 pairs x 8 channels, max |Mom(RP) - R Mom(P)| = " + fmt("%.3g", worst)};
}

Outcome epsball() {
  Rng rng(1002);
  double worst = 0.0;
  int evaluations = 0;
  for (int t = 0; t < 100; ++t) {
    const PointCloud c = random_cloud(rng, 120);
    double dmin = 1e300;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) dmin = std::min(dmin, (c[a] - c[b]).norm());
    Matrix F(120, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < F.rows(); ++i)
      for (Eigen::Index j = 0; j < F.cols(); ++j) F(i, j) = u(rng);
    const FeatureValues feats(F);
    const FeatureValues raw = radial_feature(c);
    const WeightBank bank = WeightBank::pooled_quantiles(col0(raw), col0(raw), 8);
    const UmeMatrix direct = ume_matrix(c, feats, Normalization::Sum);
    const UmeMatrix banked = ume_matrix(c, apply_weights(raw, bank), Normalization::Sum);
    for (double frac : {0.05, 0.25, 0.49}) {
      const double eps = frac * dmin;
      worst = std::max(worst, (epsball_oracle(c, feats, eps).M - direct.M).norm() / direct.M.norm());
      worst = std::max(worst, (epsball_oracle(c, raw, bank, eps).M - banked.M).norm() / banked.M.norm());
      evaluations += 2;
    }
  }
  return {worst <= 1e-12,
          std::to_string(evaluations) + " oracle evaluations on 100 clouds, max relative error " + fmt("%.3g", worst)};
}

Outcome horn() {
  Rng rng(1003);
  double worst = 0.0, worst_orth = 0.0;
  std::uniform_int_distribution<int> count(3, 10);
  for (int t = 0; t < 1000; ++t) {
    const Mat3 R = random_rotation(rng);
    const auto u = random_points(rng, static_cast<std::size_t>(count(rng)));
    std::vector<Vec3> v;
    for (const Vec3& x : u) v.push_back(R * x);
    const Mat3 Rh = horn_rotation(u, v);
    worst = std::max(worst, (Rh - R).norm());
    worst_orth = std::max({worst_orth, (Rh.transpose() * Rh - Mat3::Identity()).cwiseAbs().maxCoeff(),
                           std::abs(Rh.determinant() - 1.0)});
  }
  return {worst < 1e-9 && worst_orth < 1e-12,
          "1000 rotations, max ||R_hat - R||_F = " + fmt("%.3g", worst) + ", max SO(3) defect " + fmt("%.3g", worst_orth)};
}

Outcome disambiguation() {
  const Mesh shape = synthetic_mesh("asymmetric");
  Rng rng(1004);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const PointCloud p = normalize_unit_sphere(sample_mesh(shape, 1024, rng)).cloud;
    const RigidTransform T = random_rigid(rng, {-180, 180}, {-0.5, 0.5});
    const PointCloud q = shuffle(apply_transform(p, T), rng);
    const Disambiguation d = disambiguate(pca_frame(p), pca_frame(q));
    worst = std::max(worst, d.chamfer);
  }
  return {worst < 1e-9, "500 asymmetric clouds, max chosen-constellation Chamfer " + fmt("%.3g", worst)};
}

Outcome noise_free() {
  const MetricsReport r = run_experiment(parse_config("n_parent = 1024\ntrials = 200\nseed = 1005\nnoise = vanilla\n"));
  const MetricsRow& row = r.rows.at(0);
  double worst_c = 0.0, worst_r = 0.0;
  for (const auto& t : row.per_trial) {
    worst_c = std::max(worst_c, t.chamfer);
    worst_r = std::max(worst_r, t.rotation.rmse_deg);
  }
  return {row.failures == 0 && worst_c < 1e-6 && worst_r < 1e-3,
          "200 trials at 1024 points, max Chamfer " + fmt("%.3g", worst_c) + ", max RMSE(R) " + fmt("%.3g", worst_r) +
              " deg, pooled RMSE(R) " + fmt("%.3g", row.rmse_rotation_deg) + " deg, failures " +
              std::to_string(row.failures)};
}

double median_rotation_deg(const MetricsRow& row) {
  std::vector<double> v;
  for (const auto& t : row.per_trial) v.push_back(t.rotation.rmse_deg);
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

Outcome density_sweep() {
  const MetricsReport r = run_experiment(parse_config(
      "noise = zero-intersection\ntrials = 100\nseed = 1006\ndensity_sweep = 1000, 10000, 80000\nmethods = ume\n"));
  std::string detail = "pooled RMSE(R) deg";
  bool monotone = true;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    detail += " " + r.rows[k].scenario + "=" + fmt("%.4f", r.rows[k].rmse_rotation_deg);
    if (k > 0 && !(r.rows[k].rmse_rotation_deg < r.rows[k - 1].rmse_rotation_deg)) monotone = false;
  }
  detail += monotone ? ", strictly decreasing" : ", NOT decreasing";
  detail += "; per-trial median";
  for (const auto& row : r.rows) detail += " " + fmt("%.4f", median_rotation_deg(row));
  const double last = r.rows.back().rmse_rotation_deg;
  return {r.rows.size() == 3 && monotone && last <= 6.0, detail + "; 80k value " + fmt("%.4f", last)};
}

Outcome baseline_ordering() {
  const MetricsReport r =
      run_experiment(parse_config("noise = zero-intersection\ntrials = 100\nseed = 1007\nmethods = ume, icp\n"));
  const MetricsRow& ume = r.rows.at(0);
  const MetricsRow& icp = r.rows.at(1);
  return {ume.chamfer < icp.chamfer && ume.failures == 0,
          "100 trials, Chamfer ume " + fmt("%.4f", ume.chamfer) + " vs icp " + fmt("%.4f", icp.chamfer) +
              "; RMSE(R) ume " + fmt("%.2f", ume.rmse_rotation_deg) + " vs icp " + fmt("%.2f", icp.rmse_rotation_deg)};
}

Outcome ambiguity() {
  const Mesh box = synthetic_mesh("cuboid");
  Rng rng(1008);
  const int trials = 20;
  double worst_c = 0.0, worst_h = 0.0, min_rmse = 1e300;
  for (int t = 0; t < trials; ++t) {
    const PointCloud parent = normalize_unit_sphere(sample_mesh(box, 2048, rng)).cloud;
    const RigidTransform gt = random_rigid(rng, {-180, 180}, {-0.5, 0.5});
    const auto [p1, p2] = zero_intersection(parent, shuffle(apply_transform(parent, gt), rng), rng);
    // The gap: how far apart the two samplings are under the true alignment.
    const PointCloud aligned = apply_transform(p1, gt);
    const double gap_c = chamfer(aligned, p2), gap_h = hausdorff(aligned, p2);
    // Alternative: flip the box half a turn about its own z axis first.
    const RigidTransform flipped = compose(gt, RigidTransform(euler_xyz_deg(0, 0, 180), Vec3::Zero()));
    const PointCloud alt = apply_transform(p1, flipped);
    worst_c = std::max(worst_c, chamfer(alt, p2) / gap_c);
    worst_h = std::max(worst_h, hausdorff(alt, p2) / gap_h);
    min_rmse = std::min(min_rmse, rmse_rotation(gt.rotation(), flipped.rotation()));
  }
  return {worst_c < 3.0 && worst_h < 3.0 && min_rmse > 90.0,
          std::to_string(trials) + " cuboid pairs, alternative/gap ratios: Chamfer max " + fmt("%.3f", worst_c) +
              ", Hausdorff max " + fmt("%.3f", worst_h) + "; min RMSE(R) " + fmt("%.2f", min_rmse) + " deg"};
}

Outcome metric_sanity() {
  Rng rng(1009);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const PointCloud a = random_cloud(rng, 300), b = random_cloud(rng, 200);
    const Mat3 R = random_rotation(rng);
    const Vec3 s = random_points(rng, 1)[0];
    worst = std::max({worst, std::abs(chamfer(rotate(a, R, s), rotate(b, R, s)) - chamfer(a, b)),
                      std::abs(hausdorff(rotate(a, R, s), rotate(b, R, s)) - hausdorff(a, b))});
  }
  const auto pts = random_points(rng, 5000);
  const KdTree tree(pts);
  int mismatches = 0;
  for (int q = 0; q < 10000; ++q) {
    const Vec3 query = random_points(rng, 1, Vec3(4, 3, 2))[0];
    std::size_t arg = 0;
    const double d = brute_min_distance(query, pts, &arg);
    const auto hit = tree.nearest(query);
    if (hit.index != arg || std::sqrt(hit.squared_distance) != d) ++mismatches;
  }
  return {worst < 1e-10 && mismatches == 0, "rigid invariance max deviation " + fmt("%.3g", worst) +
                                                ", kd-tree vs linear scan mismatches " + std::to_string(mismatches) +
                                                " / 10000"};
}

}  // namespace

int main() {
  criterion("moment-covariance", 10.0, moment_covariance);
  criterion("epsball-oracle", 5.0, epsball);
  criterion("horn-recovery", 0.0, horn);
  criterion("pca-disambiguation", 0.0, disambiguation);
  criterion("noise-free-end-to-end", 60.0, noise_free);
  criterion("density-sweep", 600.0, density_sweep);
  criterion("baseline-ordering", 0.0, baseline_ordering);
  criterion("ambiguity", 0.0, ambiguity);
  criterion("metric-sanity", 0.0, metric_sanity);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
