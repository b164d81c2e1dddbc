#include "umereg/bench.hpp"
#include "umereg/errors.hpp"
#include "umereg/icp.hpp"
#include "umereg/io.hpp"
#include "umereg/metrics.hpp"
#include "umereg/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace umereg;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PointCloud to_cloud(const Points& pts) {
  std::vector<Vec3> v(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) v[static_cast<std::size_t>(i)] = pts.row(i).transpose();
  return PointCloud(std::move(v));
}

Points to_array(const PointCloud& cloud) {
  Points out(static_cast<Eigen::Index>(cloud.size()), 3);
  for (std::size_t i = 0; i < cloud.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = cloud[i].transpose();
  return out;
}

py::dict to_dict(const RegistrationResult& r) {
  py::dict d;
  d["rotation"] = r.transform.rotation();
  d["translation"] = r.transform.translation();
  d["constellation"] = r.chosen_constellation;
  d["residual"] = r.residual;
  d["iterations"] = r.iterations;
  d["flags"] = r.degeneracy_flags;
  return d;
}

py::list rows(const MetricsReport& report) {
  py::list out;
  for (const auto& row : report.rows) {
    py::dict d;
    d["method"] = row.method;
    d["scenario"] = row.scenario;
    d["chamfer"] = row.chamfer;
    d["hausdorff"] = row.hausdorff;
    d["rmse_rotation_deg"] = row.rmse_rotation_deg;
    d["rmse_translation"] = row.rmse_translation;
    d["trials"] = row.trials;
    d["failures"] = row.failures;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_umereg, m) {
  m.doc() = "Closed-form rigid point-cloud registration with universal manifold embedding moments.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", error.ptr());

  m.def(
      "register_ume",
      [](const Points& src, const Points& dst, int channels) {
        UmeConfig config;
        config.channels = channels;
        return to_dict(register_ume(to_cloud(src), to_cloud(dst), config));
      },
      py::arg("src"), py::arg("dst"), py::arg("channels") = 8,
      "Registers src onto dst; returns rotation, translation, constellation, residual and flags.");

  m.def(
      "register_icp",
      [](const Points& src, const Points& dst, int max_iterations, double tol) {
        IcpConfig config;
        config.max_iterations = max_iterations;
        config.convergence_tol = tol;
        return to_dict(icp(to_cloud(src), to_cloud(dst), config));
      },
      py::arg("src"), py::arg("dst"), py::arg("max_iterations") = 100, py::arg("tol") = 1e-8);

  m.def(
      "apply_transform",
      [](const Points& pts, const Mat3& R, const Vec3& t) {
        return to_array(apply_transform(to_cloud(pts), RigidTransform(R, t)));
      },
      py::arg("points"), py::arg("rotation"), py::arg("translation"));

  m.def(
      "chamfer", [](const Points& a, const Points& b) { return chamfer(to_cloud(a), to_cloud(b)); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "hausdorff", [](const Points& a, const Points& b) { return hausdorff(to_cloud(a), to_cloud(b)); }, py::arg("a"),
      py::arg("b"));
  m.def("rmse_rotation", &rmse_rotation, py::arg("r_gt"), py::arg("r_pred"), "Euler-angle RMSE in degrees.");
  m.def("rmse_translation", &rmse_translation, py::arg("t_gt"), py::arg("t_pred"));
  m.def("euler_xyz_deg", &euler_xyz_deg, py::arg("x"), py::arg("y"), py::arg("z"),
        "Rotation from extrinsic X-then-Y-then-Z angles in degrees.");

  m.def(
      "load_points", [](const std::string& path) { return to_array(load_points(path)); }, py::arg("path"));
  m.def(
      "save_xyz", [](const Points& pts, const std::string& path) { save_xyz(to_cloud(pts), path); }, py::arg("points"),
      py::arg("path"));
  m.def(
      "read_umef",
      [](const std::string& path) {
        const UmefBundle b = read_umef(path);
        return py::make_tuple(to_array(b.coords), b.features);
      },
      py::arg("path"), "Returns (coords, features).");
  m.def(
      "write_umef",
      [](const Points& coords, const Matrix& features, const std::string& path) {
        write_umef(UmefBundle{to_cloud(coords), features}, path);
      },
      py::arg("coords"), py::arg("features"), py::arg("path"));
  m.def(
      "transform_to_json", [](const Mat3& R, const Vec3& t) { return transform_to_json(RigidTransform(R, t)); },
      py::arg("rotation"), py::arg("translation"));

  m.def(
      "run_benchmark", [](const std::string& config_text) { return rows(run_experiment(parse_config(config_text))); },
      py::arg("config"), "Runs a benchmark from config text; returns one dict per (method, scenario) row.");
}
