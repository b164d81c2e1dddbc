// Command-line front end: register, synth, bench, metrics, export-canon.

#include "umereg/bench.hpp"
#include "umereg/canon.hpp"
#include "umereg/errors.hpp"
#include "umereg/icp.hpp"
#include "umereg/io.hpp"
#include "umereg/metrics.hpp"
#include "umereg/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace umereg;

namespace {

void print_flags(const RegistrationResult& r) {
  std::cout << "flags:";
  if (r.degeneracy_flags.empty()) std::cout << " none";
  for (const auto& f : r.degeneracy_flags) std::cout << ' ' << f;
  std::cout << '\n';
}

// Pooled radial-bin features for a pair, matching what register_ume computes.
std::pair<Matrix, Matrix> radial_bin_features(const PointCloud& a, const PointCloud& b, int channels) {
  const FeatureValues r1 = radial_feature(a), r2 = radial_feature(b);
  const WeightBank bank = WeightBank::pooled_quantiles(std::span(r1.values().data(), r1.values().size()),
                                                       std::span(r2.values().data(), r2.values().size()), channels);
  return {apply_weights(r1, bank).values(), apply_weights(r2, bank).values()};
}

std::string frame_json(const CanonicalFrame& f) {
  std::string s = "{\"centroid\": [";
  for (int k = 0; k < 3; ++k) s += (k ? ", " : "") + format_double17(f.centroid[k]);
  s += "], \"axes\": [";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s += (r + c ? ", " : "") + format_double17(f.axes(r, c));
  s += "], \"eigenvalues\": [";
  for (int k = 0; k < 3; ++k) s += (k ? ", " : "") + format_double17(f.eigenvalues[k]);
  s += "], \"near_degenerate\": ";
  s += f.near_degenerate ? "true" : "false";
  return s + "}";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

int run_register(const std::string& src, const std::string& dst, const std::string& method, const std::string& umef_src,
                 const std::string& umef_dst, const std::string& out) {
  const PointCloud p1 = load_points(src);
  const PointCloud p2 = load_points(dst);
  RegistrationResult r;
  if (method == "ume") {
    r = register_ume(p1, p2);
  } else if (method == "icp") {
    r = icp(p1, p2);
  } else {
    if (umef_src.empty() || umef_dst.empty()) throw ConfigError("--method external needs --umef-src and --umef-dst");
    r = register_with_external(p1, p2, read_umef(umef_src), read_umef(umef_dst));
  }
  write_transform_json(r.transform, out);
  std::cout << "method: " << method << "\nresidual: " << format_double_shortest(r.residual)
            << "\nconstellation: " << r.chosen_constellation << '\n';
  if (method == "icp") std::cout << "iterations: " << r.iterations << '\n';
  print_flags(r);
  return 0;
}

int run_synth(const std::string& mesh, const std::string& noise, std::uint64_t seed, std::size_t n_parent,
              const std::string& prefix) {
  NoiseModel model;
  model.preset = parse_noise_preset(noise);
  ExperimentConfig cfg;
  cfg.n_parent = n_parent;
  cfg.noise = model;
  cfg.validate();
  Rng rng = trial_rng(seed, 0);
  const TrialData d = make_trial(load_model(mesh), n_parent, model, cfg.euler_range_deg, cfg.trans_range, rng);
  save_xyz(d.source, prefix + "_src.xyz");
  save_xyz(d.target, prefix + "_dst.xyz");
  write_transform_json(d.gt, prefix + "_gt.json");
  std::cout << "wrote " << prefix << "_src.xyz (" << d.source.size() << " points), " << prefix << "_dst.xyz ("
            << d.target.size() << " points), " << prefix << "_gt.json\n";
  return 0;
}

int run_bench(const std::string& config, const std::string& out, const std::string& markdown,
              const std::string& trials_out, std::size_t threads) {
  ExperimentConfig cfg = load_config(config);
  if (threads) cfg.threads = threads;
  const MetricsReport report = run_experiment(cfg);
  emit_report(report, ReportFormat::Csv, out);
  if (!markdown.empty()) emit_report(report, ReportFormat::Markdown, markdown);
  if (!trials_out.empty()) write_text(trials_out, render_trials_csv(report));
  std::cout << render_report(report, ReportFormat::Markdown);
  return 0;
}

int run_metrics(const std::string& src, const std::string& dst, const std::string& gt, const std::string& estimate) {
  const PointCloud p1 = load_points(src);
  const PointCloud p2 = load_points(dst);
  // Distances use the estimate when given, else the ground truth, else the raw clouds.
  RigidTransform T;
  if (!estimate.empty()) {
    T = read_transform_json(estimate);
  } else if (!gt.empty()) {
    T = read_transform_json(gt);
  }
  const PointCloud moved = apply_transform(p1, T);
  std::cout << "chamfer: " << format_double_shortest(chamfer(moved, p2)) << '\n'
            << "hausdorff: " << format_double_shortest(hausdorff(moved, p2)) << '\n';
  if (!gt.empty() && !estimate.empty()) {
    const RigidTransform G = read_transform_json(gt);
    const RotationError e = rotation_error(G.rotation(), T.rotation());
    std::cout << "rmse_rotation_deg: " << format_double_shortest(e.rmse_deg) << '\n'
              << "rmse_translation: " << format_double_shortest(rmse_translation(G.translation(), T.translation()))
              << '\n';
    if (e.gimbal) std::cout << "warning: gimbal-lock Euler decomposition\n";
  }
  return 0;
}

int run_export_canon(const std::string& src, const std::string& dst, const std::string& prefix, int channels) {
  const PointCloud p1 = load_points(src);
  const PointCloud p2 = load_points(dst);
  const CanonicalPair pair = canonical_pair(p1, p2);
  const auto [f1, f2] = radial_bin_features(p1, p2, channels);
  write_umef({pair.frame1.coords, f1}, prefix + "_1.umef");
  write_umef({pair.frame2.coords, f2}, prefix + "_2.umef");
  std::string json = "{\"frame1\": " + frame_json(pair.frame1) + ",\n \"frame2\": " + frame_json(pair.frame2) +
                     ",\n \"constellation\": " + std::to_string(pair.disambiguation.index) + ",\n \"chamfer\": [";
  for (std::size_t j = 0; j < pair.disambiguation.all.size(); ++j) {
    json += (j ? ", " : "") + format_double17(pair.disambiguation.all[j]);
  }
  write_text(prefix + "_frames.json", json + "]}\n");
  std::cout << "wrote " << prefix << "_1.umef, " << prefix << "_2.umef, " << prefix << "_frames.json (constellation "
            << pair.disambiguation.index << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form rigid point-cloud registration with universal manifold embeddings"};
  app.require_subcommand(1);

  std::string src, dst, method = "ume", umef_src, umef_dst, out;
  auto* reg = app.add_subcommand("register", "estimate the transform mapping --src onto --dst");
  reg->add_option("--src", src, "source cloud (.xyz/.ply/.off)")->required();
  reg->add_option("--dst", dst, "target cloud")->required();
  reg->add_option("--method", method, "ume, icp or external")->check(CLI::IsMember({"ume", "icp", "external"}));
  reg->add_option("--umef-src", umef_src, "UMEF bundle for --src (external method)");
  reg->add_option("--umef-dst", umef_dst, "UMEF bundle for --dst (external method)");
  reg->add_option("--out", out, "transform JSON")->required();

  std::string mesh, noise = "vanilla", prefix;
  std::uint64_t seed = 0;
  std::size_t n_parent = 2048;
  auto* synth = app.add_subcommand("synth", "sample a noisy registration pair with ground truth");
  synth->add_option("--mesh", mesh, "mesh file or synthetic:asymmetric / synthetic:cuboid")->required();
  synth->add_option("--noise", noise, "vanilla, bernoulli, zero-intersection or awgn")
      ->check(CLI::IsMember({"vanilla", "bernoulli", "zero-intersection", "awgn"}));
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--n-parent", n_parent, "parent sample size");
  synth->add_option("--out-prefix", prefix, "output prefix")->required();

  std::string config, markdown, trials_out;
  std::size_t threads = 0;
  auto* bench = app.add_subcommand("bench", "run a benchmark described by a key=value config");
  bench->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out, "aggregate CSV report")->required();
  bench->add_option("--markdown", markdown, "also write a markdown table");
  bench->add_option("--trials-out", trials_out, "per-trial CSV");
  bench->add_option("--threads", threads, "worker threads (overrides the config)");

  std::string gt, estimate;
  auto* metrics = app.add_subcommand("metrics", "Chamfer/Hausdorff between clouds, optionally RMSE against ground truth");
  metrics->add_option("--src", src, "source cloud")->required();
  metrics->add_option("--dst", dst, "target cloud")->required();
  metrics->add_option("--gt", gt, "ground-truth transform JSON");
  metrics->add_option("--estimate", estimate, "estimated transform JSON");

  int channels = 8;
  auto* canon = app.add_subcommand("export-canon", "write canonical frames and UMEF skeletons for a pair");
  canon->add_option("--src", src, "source cloud")->required();
  canon->add_option("--dst", dst, "target cloud")->required();
  canon->add_option("--out-prefix", prefix, "output prefix")->required();
  canon->add_option("--channels", channels, "radial bins in the skeleton features")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*reg) return run_register(src, dst, method, umef_src, umef_dst, out);
    if (*synth) return run_synth(mesh, noise, seed, n_parent, prefix);
    if (*bench) return run_bench(config, out, markdown, trials_out, threads);
    if (*metrics) return run_metrics(src, dst, gt, estimate);
    if (*canon) return run_export_canon(src, dst, prefix, channels);
  } catch (const umereg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
