#include "support/oracles.hpp"
#include "umereg/bench.hpp"
#include "umereg/canon.hpp"
#include "umereg/errors.hpp"
#include "umereg/noise.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>

using namespace umereg;
using namespace umereg::testing;

namespace {

bool equal_up_to_column_signs(const Mat3& A, const Mat3& B, double tol) {
  for (int c = 0; c < 3; ++c) {
    if (std::min((A.col(c) - B.col(c)).norm(), (A.col(c) + B.col(c)).norm()) > tol) return false;
  }
  return true;
}

PointCloud centered(const PointCloud& c) {
  Vec3 m = Vec3::Zero();
  for (const Vec3& p : c.points()) m += p;
  m /= static_cast<double>(c.size());
  std::vector<Vec3> out;
  for (const Vec3& p : c.points()) out.push_back(p - m);
  return c.with_points(out);
}

PointCloud axis_cloud() {
  return PointCloud({Vec3(2, 0, 0), Vec3(-2, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 0.5), Vec3(0, 0, -0.5)});
}

}  // namespace

TEST_CASE("covariance") {
  const Mat3 H1 = covariance(PointCloud({Vec3(1, 0, 0), Vec3(-1, 0, 0)}));
  CHECK(H1 == Vec3(2, 0, 0).asDiagonal().toDenseMatrix());

  Mat3 expected;
  expected << 2, 2, 0, 2, 2, 0, 0, 0, 0;
  CHECK(covariance(PointCloud({Vec3(1, 1, 0), Vec3(-1, -1, 0)})) == expected);

  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const PointCloud c = centered(random_cloud(rng, 300));
    const Mat3 H = covariance(c);
    CHECK((H - brute_covariance(c)).norm() <= 1e-12 * H.norm());
  }
  CHECK_THROWS_AS(covariance(PointCloud()), InvalidInput);
}

TEST_CASE("covariance is rotation-equivariant") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const PointCloud c = centered(random_cloud(rng, 50));
    const Mat3 R = random_rotation(rng);
    const Mat3 lhs = covariance(rotate(c, R));
    const Mat3 rhs = R * covariance(c) * R.transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("jacobi_eigen matches an independent solver") {
  Rng rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    Mat3 A;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) A(r, c) = g(rng);
    A = A * A.transpose();
    const SymmetricEigen e = jacobi_eigen(A);
    CHECK(e.values[0] >= e.values[1]);
    CHECK(e.values[1] >= e.values[2]);
    CHECK((e.vectors.transpose() * e.vectors - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((A * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-12 * A.norm());
    const Eigen::SelfAdjointEigenSolver<Mat3> ref(A);
    // Reference is ascending.
    for (int k = 0; k < 3; ++k) CHECK(std::abs(e.values[k] - ref.eigenvalues()[2 - k]) < 1e-12 * A.norm());
    CHECK(e.sweeps <= 50);
  }
  const SymmetricEigen zero = jacobi_eigen(Mat3::Zero());
  CHECK(zero.values == Vec3::Zero());
}

TEST_CASE("pca_frame") {
  SUBCASE("axis-aligned anisotropic cloud") {
    const CanonicalFrame f = pca_frame(axis_cloud());
    CHECK(f.axes.cwiseAbs().isApprox(Mat3::Identity(), 1e-12));
    CHECK(std::abs(f.eigenvalues[0] - 8.0) < 1e-12);
    CHECK(std::abs(f.eigenvalues[1] - 2.0) < 1e-12);
    CHECK(std::abs(f.eigenvalues[2] - 0.5) < 1e-12);
    CHECK(f.centroid.norm() < 1e-15);
    CHECK_FALSE(f.near_degenerate);
  }
  SUBCASE("frame invariants on random clouds") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
      const PointCloud c = random_cloud(rng, 200);
      const CanonicalFrame f = pca_frame(c);
      CHECK((f.axes.transpose() * f.axes - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(f.eigenvalues[0] >= f.eigenvalues[1]);
      CHECK(f.eigenvalues[1] >= f.eigenvalues[2]);
      const PointCloud back = reproject(f, f.coords);
      for (std::size_t i = 0; i < c.size(); ++i) CHECK((back[i] - c[i]).norm() < 1e-10);
      // Sign rule: largest-magnitude entry of every column is positive.
      for (int col = 0; col < 3; ++col) {
        Eigen::Index arg = 0;
        f.axes.col(col).cwiseAbs().maxCoeff(&arg);
        CHECK(f.axes(arg, col) > 0.0);
      }
    }
  }
  SUBCASE("axes rotate with the cloud") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
      const PointCloud c = random_cloud(rng, 100);
      const Mat3 R = random_rotation(rng);
      const CanonicalFrame f1 = pca_frame(c);
      const CanonicalFrame f2 = pca_frame(rotate(c, R, Vec3(0.3, -0.2, 0.1)));
      CHECK(equal_up_to_column_signs(f2.axes, R * f1.axes, 1e-9));
      // Some sign constellation matches R * D1 closely.
      double best = 1e300;
      for (const auto& fj : sign_constellations(f2)) best = std::min(best, (fj.axes - R * f1.axes).norm());
      CHECK(best < 1e-8);
    }
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(pca_frame(PointCloud({Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(2, 2, 2), Vec3(-1, -1, -1)})),
                    DegenerateGeometry);
    CHECK_THROWS_AS(pca_frame(PointCloud({Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)})), DegenerateGeometry);
    CHECK_THROWS_AS(pca_frame(PointCloud({Vec3(0, 0, 0), Vec3(1, 0, 0)})), DegenerateGeometry);
  }
  SUBCASE("isotropic clouds are flagged") {
    const CanonicalFrame f = pca_frame(PointCloud({Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0),
                                                   Vec3(0, 0, 1), Vec3(0, 0, -1)}));
    CHECK(f.near_degenerate);
  }
  SUBCASE("planar clouds are accepted") {
    const CanonicalFrame f = pca_frame(PointCloud({Vec3(2, 0, 0), Vec3(-2, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0)}));
    CHECK(f.eigenvalues[2] == doctest::Approx(0.0));
  }
}

TEST_CASE("sign_constellations") {
  Rng rng(6);
  const CanonicalFrame f = pca_frame(random_cloud(rng, 60));
  const auto all = sign_constellations(f);
  CHECK(all[0].axes == f.axes);
  for (std::size_t i = 0; i < f.coords.size(); ++i) CHECK(all[0].coords[i] == f.coords[i]);
  for (int j = 0; j < 8; ++j) {
    CHECK((all[j].axes.transpose() * all[j].axes - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    const CanonicalFrame twice = apply_constellation(all[j], j);
    for (std::size_t i = 0; i < f.coords.size(); ++i) CHECK(twice.coords[i] == f.coords[i]);
    // Coordinates stay consistent with the flipped axes.
    const PointCloud back = reproject(all[j], all[j].coords);
    const PointCloud ref = reproject(f, f.coords);
    for (std::size_t i = 0; i < f.coords.size(); ++i) CHECK((back[i] - ref[i]).norm() < 1e-12);
  }
  // Binary counter order: +++, ++-, +-+, +--, -++, ...
  CHECK(all[1].axes.col(2) == -f.axes.col(2));
  CHECK(all[1].axes.col(0) == f.axes.col(0));
  CHECK(all[2].axes.col(1) == -f.axes.col(1));
  CHECK(all[4].axes.col(0) == -f.axes.col(0));
  CHECK(all[7].axes == -f.axes);
}

TEST_CASE("disambiguate") {
  Rng rng(7);
  SUBCASE("identical frames") {
    const CanonicalFrame f = pca_frame(random_cloud(rng, 80));
    const Disambiguation d = disambiguate(f, f);
    CHECK(d.index == 0);
    CHECK(d.chamfer == 0.0);
  }
  SUBCASE("exactly rotated copies") {
    for (int t = 0; t < 50; ++t) {
      const PointCloud c = random_cloud(rng, 200);
      const CanonicalFrame f1 = pca_frame(c);
      const CanonicalFrame f2 = pca_frame(rotate(c, random_rotation(rng), Vec3(1, 2, 3)));
      const Disambiguation d = disambiguate(f1, f2);
      CHECK(d.chamfer < 1e-9);
      CHECK(d.chamfer == d.all[d.index]);
    }
  }
  SUBCASE("zero-intersection halves pick the noise-free constellation") {
    const Mesh shape = synthetic_mesh("asymmetric");
    const int trials = 100;
    int agree = 0;
    for (int t = 0; t < trials; ++t) {
      const PointCloud parent = normalize_unit_sphere(sample_mesh(shape, 2048, rng)).cloud;
      const Mat3 R = random_rotation(rng);
      const PointCloud moved = rotate(parent, R);
      const auto [a, b] = zero_intersection(parent, moved, rng);
      const CanonicalFrame f1 = pca_frame(a);
      const CanonicalFrame f2 = pca_frame(b);
      int truth = 0;
      double best = 1e300;
      for (int j = 0; j < 8; ++j) {
        const double err = (apply_constellation(f2, j).axes - R * f1.axes).norm();
        if (err < best) {
          best = err;
          truth = j;
        }
      }
      agree += disambiguate(f1, f2).index == truth ? 1 : 0;
    }
    CHECK(agree >= 95);
  }
}

TEST_CASE("reproject") {
  Rng rng(8);
  const CanonicalFrame f = pca_frame(random_cloud(rng, 40));
  const PointCloud origin = reproject(f, PointCloud({Vec3::Zero()}));
  CHECK((origin[0] - f.centroid).norm() == 0.0);

  // Arbitrary coordinates map isometrically.
  const PointCloud coords = random_cloud(rng, 30);
  const PointCloud world = reproject(f, coords);
  for (std::size_t a = 0; a < coords.size(); ++a) {
    for (std::size_t b = a + 1; b < coords.size(); ++b) {
      CHECK(std::abs((world[a] - world[b]).norm() - (coords[a] - coords[b]).norm()) < 1e-10);
    }
  }
}
