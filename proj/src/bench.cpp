#include "umereg/bench.hpp"

#include "umereg/errors.hpp"
#include "umereg/icp.hpp"
#include "umereg/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace umereg {

NoisePreset parse_noise_preset(const std::string& name) {
  if (name == "vanilla" || name == "none") return NoisePreset::Vanilla;
  if (name == "bernoulli") return NoisePreset::Bernoulli;
  if (name == "zero-intersection") return NoisePreset::ZeroIntersection;
  if (name == "awgn") return NoisePreset::Awgn;
  throw ConfigError("unknown noise preset '" + name + "'");
}

std::string to_string(NoisePreset preset) {
  switch (preset) {
    case NoisePreset::Vanilla:
      return "vanilla";
    case NoisePreset::Bernoulli:
      return "bernoulli";
    case NoisePreset::ZeroIntersection:
      return "zero-intersection";
    case NoisePreset::Awgn:
      return "awgn";
  }
  return "?";
}

NoiseSpec NoiseModel::draw(Rng& rng) const {
  auto uniform = [&rng](Interval r) {
    return r.lo == r.hi ? r.lo : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  switch (preset) {
    case NoisePreset::Vanilla:
      return noise::None{};
    case NoisePreset::Bernoulli: {
      const double a = q1 ? *q1 : uniform(q_range);
      const double b = q2 ? *q2 : uniform(q_range);
      return noise::Bernoulli{a, b};
    }
    case NoisePreset::ZeroIntersection:
      return noise::ZeroIntersection{};
    case NoisePreset::Awgn:
      return noise::Awgn{sigma ? *sigma : uniform(sigma_range)};
  }
  return noise::None{};
}

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::Ume:
      return "ume";
    case Kind::Icp:
      return "icp";
    case Kind::External:
      return "external";
  }
  return "?";
}

MethodSpec parse_method(const std::string& text) {
  if (text == "ume") return {MethodSpec::Kind::Ume, {}};
  if (text == "icp") return {MethodSpec::Kind::Icp, {}};
  if (text.starts_with("external:")) return {MethodSpec::Kind::External, text.substr(9)};
  if (text.starts_with("external(") && text.ends_with(")")) {
    return {MethodSpec::Kind::External, text.substr(9, text.size() - 10)};
  }
  throw ConfigError("unknown method '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (datasets.empty()) throw ConfigError("at least one dataset is required");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (euler_range_deg.hi < euler_range_deg.lo || trans_range.hi < trans_range.lo) {
    throw ConfigError("empty euler or translation range");
  }
  std::vector<std::size_t> sizes = density_sweep.empty() ? std::vector<std::size_t>{n_parent} : density_sweep;
  for (std::size_t n : sizes) {
    if (n < 8) throw ConfigError("parent cloud size must be >= 8");
    if (noise.preset == NoisePreset::ZeroIntersection && n % 2 != 0) {
      throw ConfigError("zero-intersection needs an even parent size");
    }
  }
  if (noise.q1) umereg::validate(noise::Bernoulli{*noise.q1, noise.q2.value_or(1.0)});
  if (noise.q_range.lo <= 0.0 || noise.q_range.hi > 1.0 || noise.q_range.hi < noise.q_range.lo) {
    throw ConfigError("bernoulli_range must lie in (0, 1]");
  }
  if (noise.sigma && *noise.sigma < 0.0) throw ConfigError("awgn_sigma must be non-negative");
  if (noise.sigma_range.lo < 0.0 || noise.sigma_range.hi < noise.sigma_range.lo) {
    throw ConfigError("awgn_sigma_range must be a non-negative interval");
  }
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const InvalidInput&) {
    throw ConfigError("key '" + key + "': invalid number '" + value + "'");
  }
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0 || v != std::floor(v)) throw ConfigError("key '" + key + "': expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': expected an unsigned integer");
  return v;
}

Interval to_interval(const std::string& key, const std::string& value) {
  const auto parts = split_list(value);
  if (parts.size() != 2) throw ConfigError("key '" + key + "': expected 'lo,hi'");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));

    if (key == "dataset" || key == "datasets") {
      cfg.datasets = split_list(value);
    } else if (key == "n_parent") {
      cfg.n_parent = to_size(key, value);
    } else if (key == "trials") {
      cfg.trials = to_size(key, value);
    } else if (key == "seed") {
      cfg.seed = to_u64(key, value);
    } else if (key == "noise") {
      cfg.noise.preset = parse_noise_preset(value);
    } else if (key == "bernoulli_q") {
      const auto parts = split_list(value);
      if (parts.empty() || parts.size() > 2) throw ConfigError("bernoulli_q expects 'q' or 'q1,q2'");
      cfg.noise.q1 = to_double(key, parts[0]);
      cfg.noise.q2 = to_double(key, parts.back());
    } else if (key == "bernoulli_range") {
      cfg.noise.q_range = to_interval(key, value);
    } else if (key == "awgn_sigma") {
      cfg.noise.sigma = to_double(key, value);
    } else if (key == "awgn_sigma_range") {
      cfg.noise.sigma_range = to_interval(key, value);
    } else if (key == "euler_range_deg") {
      cfg.euler_range_deg = to_interval(key, value);
    } else if (key == "trans_range") {
      cfg.trans_range = to_interval(key, value);
    } else if (key == "methods" || key == "method") {
      cfg.methods.clear();
      for (const auto& m : split_list(value)) cfg.methods.push_back(parse_method(m));
    } else if (key == "density_sweep") {
      cfg.density_sweep.clear();
      for (const auto& n : split_list(value)) cfg.density_sweep.push_back(to_size(key, n));
    } else if (key == "threads") {
      cfg.threads = to_size(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

// Egg-shaped, anisotropic blob with three narrow bumps of different heights
// and one shallow dent: no rotational symmetry, and radial shells carry
// strongly non-zero first moments.
Mesh asymmetric_blob(int rings, int segments) {
  const std::array<Vec3, 4> centers{Vec3(1.0, 0.3, 0.2).normalized(), Vec3(-0.3, 1.0, -0.2).normalized(),
                                    Vec3(-0.4, -0.3, 1.0).normalized(), Vec3(0.2, -0.8, -0.5).normalized()};
  const std::array<double, 4> amplitude{1.2, 0.7, 0.45, -0.2};
  const std::array<double, 4> width{0.15, 0.12, 0.12, 0.3};
  const Vec3 stretch(1.4, 1.0, 0.75);
  const double taper = 0.25;

  auto surface = [&](double theta, double phi) -> Vec3 {
    const Vec3 u(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    double r = 1.0 + taper * u[0];
    for (std::size_t k = 0; k < centers.size(); ++k) r += amplitude[k] * std::exp(-(u - centers[k]).squaredNorm() / width[k]);
    return Vec3(r * u).cwiseProduct(stretch);
  };

  Mesh mesh;
  mesh.vertices.push_back(surface(0.0, 0.0));
  for (int i = 1; i < rings; ++i) {
    const double theta = std::numbers::pi * i / rings;
    for (int j = 0; j < segments; ++j) mesh.vertices.push_back(surface(theta, 2.0 * std::numbers::pi * j / segments));
  }
  mesh.vertices.push_back(surface(std::numbers::pi, 0.0));
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  auto ring = [segments](int i, int j) { return static_cast<std::uint32_t>(1 + (i - 1) * segments + (j % segments)); };
  for (int j = 0; j < segments; ++j) mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < segments; ++j) mesh.triangles.push_back({south, ring(rings - 1, j + 1), ring(rings - 1, j)});
  return mesh;
}

Mesh box(const Vec3& half) {
  Mesh mesh;
  for (int k = 0; k < 8; ++k) {
    mesh.vertices.emplace_back((k & 1 ? 1 : -1) * half[0], (k & 2 ? 1 : -1) * half[1], (k & 4 ? 1 : -1) * half[2]);
  }
  const std::array<std::array<std::uint32_t, 4>, 6> quads{{{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                                                           {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}}};
  for (const auto& q : quads) {
    mesh.triangles.push_back({q[0], q[1], q[2]});
    mesh.triangles.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

}  // namespace

Mesh synthetic_mesh(const std::string& name) {
  if (name == "asymmetric") return asymmetric_blob(96, 192);
  if (name == "cuboid") return box(Vec3(1.0, 0.5, 0.25));
  throw ConfigError("unknown synthetic shape '" + name + "'");
}

Model load_model(const std::string& dataset) {
  Model model;
  model.name = dataset;
  if (dataset.starts_with("synthetic:")) {
    model.mesh = synthetic_mesh(dataset.substr(10));
    return model;
  }
  const std::filesystem::path path(dataset);
  const FileFormat format = format_from_path(path);
  if (format == FileFormat::Xyz) {
    model.cloud = load_points(path);
    return model;
  }
  Mesh mesh = load_mesh(path);
  if (mesh.triangles.empty()) {
    model.cloud = with_sequential_ids(std::move(mesh.vertices));
  } else {
    model.mesh = std::move(mesh);
  }
  return model;
}

namespace {

Rng stream_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace

Rng trial_rng(std::uint64_t master_seed, std::size_t trial_index) { return stream_rng(master_seed, 0, trial_index); }

TrialData make_trial(const Model& model, std::size_t n_parent, const NoiseModel& noise, Interval euler_range_deg,
                     Interval trans_range, Rng& rng) {
  PointCloud parent;
  if (model.mesh) {
    parent = sample_mesh(*model.mesh, n_parent, rng);
  } else if (model.cloud) {
    if (model.cloud->size() < n_parent) {
      throw InvalidInput(model.name + " has fewer points than the parent size " + std::to_string(n_parent));
    }
    std::vector<std::size_t> idx(model.cloud->size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n_parent);
    std::sort(idx.begin(), idx.end());
    std::vector<Vec3> pts;
    pts.reserve(n_parent);
    for (std::size_t i : idx) pts.push_back((*model.cloud)[i]);
    parent = with_sequential_ids(std::move(pts));
  } else {
    throw InvalidInput("model has neither mesh nor cloud");
  }
  parent = normalize_unit_sphere(parent).cloud;

  TrialData data;
  data.gt = random_rigid(rng, euler_range_deg, trans_range);
  PointCloud target = shuffle(apply_transform(parent, data.gt), rng);
  data.noise = noise.draw(rng);

  if (const auto* b = std::get_if<noise::Bernoulli>(&data.noise)) {
    std::tie(data.source, data.target) = bernoulli_noise(parent, target, b->q1, b->q2, rng);
  } else if (std::holds_alternative<noise::ZeroIntersection>(data.noise)) {
    std::tie(data.source, data.target) = zero_intersection(parent, target, rng);
  } else if (const auto* a = std::get_if<noise::Awgn>(&data.noise)) {
    data.source = std::move(parent);
    data.target = awgn(target, a->sigma, rng);
  } else {
    data.source = std::move(parent);
    data.target = std::move(target);
  }
  return data;
}

namespace {

std::string substitute(std::string pattern, const std::string& key, const std::string& value) {
  for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos + value.size())) {
    pattern.replace(pos, key.size(), value);
  }
  return pattern;
}

RegistrationResult run_method(const MethodSpec& method, const TrialData& data, std::size_t trial) {
  switch (method.kind) {
    case MethodSpec::Kind::Ume:
      return register_ume(data.source, data.target);
    case MethodSpec::Kind::Icp:
      return icp(data.source, data.target);
    case MethodSpec::Kind::External: {
      const std::string base = substitute(method.pattern, "{trial}", std::to_string(trial));
      const UmefBundle b1 = read_umef(substitute(base, "{cloud}", "1"));
      const UmefBundle b2 = read_umef(substitute(base, "{cloud}", "2"));
      return register_with_external(data.source, data.target, b1, b2);
    }
  }
  throw ConfigError("unknown method");
}

TrialMetrics score(const TrialData& data, const RigidTransform& estimate, std::size_t trial) {
  TrialMetrics m;
  m.trial = trial;
  const PointCloud moved = apply_transform(data.source, estimate);
  m.chamfer = chamfer(moved, data.target);
  m.hausdorff = hausdorff(moved, data.target);
  m.rotation = rotation_error(data.gt.rotation(), estimate.rotation());
  m.translation_error = rmse_translation(data.gt.translation(), estimate.translation());
  m.ok = true;
  return m;
}

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<Model> models;
  for (const auto& d : config.datasets) models.push_back(load_model(d));

  const bool sweep = !config.density_sweep.empty();
  const std::vector<std::size_t> sizes = sweep ? config.density_sweep : std::vector<std::size_t>{config.n_parent};
  const std::size_t n_methods = config.methods.size();
  const std::size_t n_tasks = sizes.size() * config.trials;

  // results[(scenario * trials + trial) * methods + method]
  std::vector<TrialMetrics> results(n_tasks * n_methods);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t scenario = task / config.trials;
      const std::size_t trial = task % config.trials;
      const std::size_t slot = task * n_methods;
      Rng rng = stream_rng(config.seed, scenario, trial);
      std::optional<TrialData> data;
      std::string data_error;
      try {
        data = make_trial(models[trial % models.size()], sizes[scenario], config.noise, config.euler_range_deg,
                          config.trans_range, rng);
      } catch (const std::exception& e) {
        data_error = e.what();
      }
      for (std::size_t m = 0; m < n_methods; ++m) {
        TrialMetrics& out = results[slot + m];
        out.trial = trial;
        if (!data) {
          out.error = data_error;
          continue;
        }
        try {
          out = score(*data, run_method(config.methods[m], *data, trial).transform, trial);
        } catch (const std::exception& e) {
          out.ok = false;
          out.error = e.what();
        }
      }
    }
  };

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_tasks);
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  MetricsReport report;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::string scenario = to_string(config.noise.preset);
    if (sweep) scenario += "@" + std::to_string(sizes[s]);
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<TrialMetrics> trials;
      trials.reserve(config.trials);
      for (std::size_t t = 0; t < config.trials; ++t) trials.push_back(results[(s * config.trials + t) * n_methods + m]);
      report.rows.push_back(aggregate(config.methods[m].name(), scenario, std::move(trials)));
    }
  }
  return report;
}

namespace {

const char* kReportColumns[] = {"method", "scenario", "chamfer", "hausdorff", "rmse_rotation_deg", "rmse_translation",
                                "trials", "failures"};

std::vector<std::string> report_cells(const MetricsRow& row) {
  return {row.method,
          row.scenario,
          format_double_shortest(row.chamfer),
          format_double_shortest(row.hausdorff),
          format_double_shortest(row.rmse_rotation_deg),
          format_double_shortest(row.rmse_translation),
          std::to_string(row.trials),
          std::to_string(row.failures)};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string render_report(const MetricsReport& report, ReportFormat format) {
  if (report.rows.empty()) throw InvalidInput("cannot render an empty report");
  std::string out;
  if (format == ReportFormat::Csv) {
    for (std::size_t k = 0; k < std::size(kReportColumns); ++k) out += (k ? "," : "") + std::string(kReportColumns[k]);
    out += '\n';
    for (const auto& row : report.rows) {
      const auto cells = report_cells(row);
      for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + csv_escape(cells[k]);
      out += '\n';
    }
    return out;
  }
  out += "|";
  for (const char* c : kReportColumns) out += std::string(" ") + c + " |";
  out += "\n|";
  for (std::size_t k = 0; k < std::size(kReportColumns); ++k) out += k < 2 ? "---|" : "---:|";
  out += '\n';
  for (const auto& row : report.rows) {
    out += "|";
    for (const auto& cell : report_cells(row)) out += " " + cell + " |";
    out += '\n';
  }
  return out;
}

std::string render_trials_csv(const MetricsReport& report) {
  std::string out = "method,scenario,trial,status,chamfer,hausdorff,rmse_rotation_deg,rmse_translation,error\n";
  for (const auto& row : report.rows) {
    for (const auto& t : row.per_trial) {
      out += csv_escape(row.method) + ',' + csv_escape(row.scenario) + ',' + std::to_string(t.trial) + ',' +
             (t.ok ? "ok" : "failed") + ',';
      if (t.ok) {
        out += format_double_shortest(t.chamfer) + ',' + format_double_shortest(t.hausdorff) + ',' +
               format_double_shortest(t.rotation.rmse_deg) + ',' + format_double_shortest(t.translation_error) + ',';
      } else {
        out += ",,,,";
      }
      out += csv_escape(t.error) + '\n';
    }
  }
  return out;
}

void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path) {
  const std::string text = render_report(report, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("write failed: " + path.string());
}

}  // namespace umereg
