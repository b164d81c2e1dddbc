#pragma once

#include "umereg/geom.hpp"
#include "umereg/io.hpp"
#include "umereg/metrics.hpp"
#include "umereg/noise.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace umereg {

enum class NoisePreset { Vanilla, Bernoulli, ZeroIntersection, Awgn };

NoisePreset parse_noise_preset(const std::string& name);
std::string to_string(NoisePreset preset);

/// Observation model of an experiment. Parameters left unset are drawn per
/// trial from the ranges (Bernoulli q in [0.2, 1], AWGN sigma in [0, 0.04]).
struct NoiseModel {
  NoisePreset preset = NoisePreset::Vanilla;
  std::optional<double> q1, q2;
  Interval q_range{0.2, 1.0};
  std::optional<double> sigma;
  Interval sigma_range{0.0, 0.04};

  NoiseSpec draw(Rng& rng) const;
};

struct MethodSpec {
  enum class Kind { Ume, Icp, External };
  Kind kind = Kind::Ume;
  /// External only: path with "{trial}" and "{cloud}" (1 or 2) placeholders.
  std::string pattern;

  std::string name() const;
};
MethodSpec parse_method(const std::string& text);

struct ExperimentConfig {
  /// Mesh or cloud files, or built-in shapes "synthetic:asymmetric" /
  /// "synthetic:cuboid". Trial i uses dataset i % size.
  std::vector<std::string> datasets{"synthetic:asymmetric"};
  std::size_t n_parent = 2048;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  NoiseModel noise;
  Interval euler_range_deg{-180.0, 180.0};
  Interval trans_range{-0.5, 0.5};
  std::vector<MethodSpec> methods{MethodSpec{}};
  /// When non-empty, every scenario is repeated per parent size.
  std::vector<std::size_t> density_sweep;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Flat key=value text, '#' comments. Keys mirror ExperimentConfig fields:
/// dataset, n_parent, trials, seed, noise, bernoulli_q, bernoulli_range,
/// awgn_sigma, awgn_sigma_range, euler_range_deg, trans_range, methods,
/// density_sweep, threads. Lists and intervals are comma-separated.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Built-in test shapes.
Mesh synthetic_mesh(const std::string& name);

/// Parent-cloud source: either a mesh to sample or a fixed cloud to subsample.
struct Model {
  std::string name;
  std::optional<Mesh> mesh;
  std::optional<PointCloud> cloud;
};
Model load_model(const std::string& dataset);

/// One generated registration problem.
struct TrialData {
  PointCloud source;
  PointCloud target;
  RigidTransform gt;
  NoiseSpec noise;
};

/// Per-trial stream derived from (master seed, trial index).
Rng trial_rng(std::uint64_t master_seed, std::size_t trial_index);

/// Samples a unit-sphere-normalized parent of n_parent points, draws the
/// ground truth, transforms and shuffles the target, then applies noise.
TrialData make_trial(const Model& model, std::size_t n_parent, const NoiseModel& noise, Interval euler_range_deg,
                     Interval trans_range, Rng& rng);

/// Runs every method on every trial. Output does not depend on the thread
/// count; failed trials are recorded per row, not thrown.
MetricsReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Csv, Markdown };

std::string render_report(const MetricsReport& report, ReportFormat format);
std::string render_trials_csv(const MetricsReport& report);
void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace umereg
