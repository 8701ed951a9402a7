// Command-line front end: canonical experiment presets plus a free-form
// `custom` mode, each writing one CSV/JSON result file per configuration.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lfpe/harness.hpp"

namespace {

namespace fs = std::filesystem;
using lfpe::BackendKind;
using lfpe::ExperimentSpec;

// One runnable configuration; `label` disambiguates sibling output files when
// a preset expands to several configurations.
struct NamedSpec {
  std::string label;
  ExperimentSpec spec;
};

struct OutputOptions {
  std::string path;  // empty = derive from the subcommand name and format
  std::string format = "csv";
  bool raw = false;
  bool dry_run = false;
  unsigned jobs = 0;
};

// Flags shared by every subcommand, bound straight onto the ExperimentSpec
// fields so a preset's defaults survive unless the user overrides them.
void add_common_options(CLI::App& cmd, ExperimentSpec& spec, OutputOptions& out) {
  cmd.add_option("--seed", spec.master_seed, "Master seed for every random draw")
      ->envname("LFPE_SEED");
  cmd.add_option("--trials", spec.trials, "Independent repetitions per sweep point")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--alpha", spec.alpha, "Dark-count probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--beta", spec.beta, "Missed-photon probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("-N,--measurements", spec.measurements, "Measurements per trial")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--ess-threshold", spec.resample.ess_threshold_fraction,
                 "Resample when ESS drops below this fraction of n");
  cmd.add_option("--liu-west-a", spec.resample.liu_west_a, "Liu-West shrinkage coefficient");
  cmd.add_option("--retries", spec.zero_posterior_retries,
                 "Fresh likelihood re-draws before a uniform-weight reset");
  cmd.add_option("--gamma", spec.ale_gamma, "Hedging pseudocount of the adaptive estimator");
  cmd.add_option("--max-samples", spec.ale_max_samples,
                 "Per-particle draw budget of the adaptive estimator")
      ->check(CLI::PositiveNumber);
  cmd.add_option("-o,--output", out.path, "Output path (multi-config presets add suffixes)");
  cmd.add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd.add_flag("--raw", out.raw, "Include per-trial records (JSON format only)");
  cmd.add_flag("--dry-run", out.dry_run, "Print the resolved configurations and exit");
  cmd.add_option("-j,--jobs", out.jobs, "Worker threads (0 = hardware concurrency)");
}

fs::path config_output_path(const OutputOptions& out, const std::string& default_stem,
                            const std::string& label, bool multi_config) {
  fs::path path = out.path.empty()
                      ? fs::path(default_stem + (out.format == "json" ? ".json" : ".csv"))
                      : fs::path(out.path);
  if (multi_config) {
    fs::path suffixed = path.parent_path();
    suffixed /= path.stem().string() + "_" + label + path.extension().string();
    return suffixed;
  }
  return path;
}

// Write-then-rename so readers never observe a half-written file.
void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream stream(temp, std::ios::binary | std::ios::trunc);
    if (!stream) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    stream << content;
    if (!stream.flush()) throw std::runtime_error("failed writing " + temp.string());
  }
  fs::rename(temp, path);
}

int run_configs(const std::vector<NamedSpec>& configs, const OutputOptions& out,
                const std::string& default_stem) {
  if (out.raw && out.format != "json") {
    throw std::invalid_argument("--raw requires --format json");
  }
  for (const NamedSpec& config : configs) lfpe::validate(config.spec);

  if (out.dry_run) {
    for (const NamedSpec& config : configs) {
      const fs::path path =
          config_output_path(out, default_stem, config.label, configs.size() > 1);
      std::cout << "# " << (config.label.empty() ? "config" : config.label) << " -> "
                << path.string() << "\n"
                << lfpe::spec_json(config.spec);
    }
    return 0;
  }

  for (const NamedSpec& config : configs) {
    const fs::path path = config_output_path(out, default_stem, config.label, configs.size() > 1);
    const auto start = std::chrono::steady_clock::now();
    const lfpe::SweepResult result = lfpe::run_sweep(config.spec, out.jobs);
    const std::string payload = out.format == "json" ? lfpe::sweep_json(result, out.raw)
                                                     : lfpe::sweep_csv(result);
    atomic_write(path, payload);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof(timing), "%.1f", seconds);
    std::cout << "wrote " << path.string() << " (" << result.points.size() << " points, "
              << config.spec.trials << " trials, " << timing << " s)\n";
  }
  return 0;
}

// --- Preset grids ---------------------------------------------------------

ExperimentSpec figure_base() {
  ExperimentSpec spec;
  spec.alpha = 0.9;
  spec.beta = 0.05;
  spec.measurements = 1000;
  spec.trials = 100;
  return spec;
}

std::vector<std::size_t> to_particle_counts(const std::vector<double>& values) {
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw std::invalid_argument("sweep values must be positive integers");
    }
    counts.push_back(static_cast<std::size_t>(v));
  }
  return counts;
}

std::vector<std::uint64_t> to_counts64(const std::vector<double>& values) {
  std::vector<std::uint64_t> counts;
  for (double v : values) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
      throw std::invalid_argument("sweep values must be positive integers");
    }
    counts.push_back(static_cast<std::uint64_t>(v));
  }
  return counts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential Monte Carlo parameter estimation for a noisy photodetector"};
  app.require_subcommand(1);

  // fig2-left: accuracy against particle count, exact likelihoods next to the
  // one-draw-per-particle estimator.
  ExperimentSpec left_spec = figure_base();
  left_spec.sweep = lfpe::ParticleCountSweep{{10, 32, 100, 316, 1000}};
  OutputOptions left_out;
  std::vector<double> left_values;
  CLI::App* left = app.add_subcommand(
      "fig2-left", "Particle-count sweep: exact likelihoods vs single-draw estimates");
  add_common_options(*left, left_spec, left_out);
  left->add_option("--values", left_values, "Override the swept particle counts");

  // fig2-mid: accuracy against the per-particle batch size.
  ExperimentSpec mid_spec = figure_base();
  mid_spec.backend = BackendKind::kFixedM;
  mid_spec.sweep = lfpe::SamplesPerParticleSweep{100, {1, 3, 10, 32, 100}};
  OutputOptions mid_out;
  std::vector<double> mid_values;
  std::size_t mid_particles = 100;
  CLI::App* mid =
      app.add_subcommand("fig2-mid", "Batch-size sweep at fixed particle count");
  add_common_options(*mid, mid_spec, mid_out);
  mid->add_option("-n,--particles", mid_particles, "Particle count")->check(CLI::PositiveNumber);
  mid->add_option("--values", mid_values, "Override the swept batch sizes");

  // fig2-right: fixed per-datum budget n*m split three ways.
  ExperimentSpec right_spec = figure_base();
  right_spec.backend = BackendKind::kFixedM;
  OutputOptions right_out;
  std::vector<double> right_values;
  CLI::App* right = app.add_subcommand(
      "fig2-right", "Total-budget sweep: the same n*m split at m = 1, 10, 100");
  add_common_options(*right, right_spec, right_out);
  right->add_option("--values", right_values, "Override the swept budgets");

  // fig3: simulation cost against the adaptive estimator's tolerance.
  ExperimentSpec fig3_spec = figure_base();
  fig3_spec.backend = BackendKind::kAle;
  fig3_spec.sweep = lfpe::AleToleranceSweep{100, {0.3, 0.1, 0.03, 0.01, 0.003}};
  OutputOptions fig3_out;
  std::vector<double> fig3_values;
  std::size_t fig3_particles = 100;
  CLI::App* fig3 =
      app.add_subcommand("fig3", "Tolerance sweep of the adaptive likelihood estimator");
  add_common_options(*fig3, fig3_spec, fig3_out);
  fig3->add_option("-n,--particles", fig3_particles, "Particle count")
      ->check(CLI::PositiveNumber);
  fig3->add_option("--values", fig3_values, "Override the swept tolerances");

  // custom: free-form single configuration.
  ExperimentSpec custom_spec;
  OutputOptions custom_out;
  std::string custom_backend = "single_sample";
  std::string custom_sweep = "particles";
  std::vector<double> custom_values{100};
  std::size_t custom_particles = 100;
  std::uint64_t custom_m = 1;
  double custom_epsilon = 0.0;
  CLI::App* custom = app.add_subcommand("custom", "Single configuration with a chosen sweep");
  add_common_options(*custom, custom_spec, custom_out);
  custom->add_option("--backend", custom_backend, "Estimation backend")
      ->check(CLI::IsMember({"strong", "single_sample", "fixed_m", "ale"}));
  custom->add_option("--sweep", custom_sweep, "Swept axis")
      ->check(CLI::IsMember({"particles", "samples", "budget", "epsilon"}));
  custom->add_option("--values", custom_values, "Swept values");
  custom->add_option("-n,--particles", custom_particles,
                     "Particle count for samples/epsilon sweeps")
      ->check(CLI::PositiveNumber);
  custom->add_option("-m,--samples-per-particle", custom_m,
                     "Batch size for the fixed-batch backend")
      ->check(CLI::PositiveNumber);
  custom->add_option("--epsilon", custom_epsilon,
                     "Adaptive tolerance (0 = per-point default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (left->parsed()) {
      if (!left_values.empty()) {
        std::get<lfpe::ParticleCountSweep>(left_spec.sweep).particle_counts =
            to_particle_counts(left_values);
      }
      ExperimentSpec strong = left_spec;
      strong.backend = BackendKind::kStrong;
      ExperimentSpec single = left_spec;
      single.backend = BackendKind::kSingleSample;
      return run_configs({{"strong", strong}, {"single_sample", single}}, left_out, "fig2_left");
    }
    if (mid->parsed()) {
      auto& sweep = std::get<lfpe::SamplesPerParticleSweep>(mid_spec.sweep);
      sweep.particle_count = mid_particles;
      if (!mid_values.empty()) sweep.samples_per_particle = to_counts64(mid_values);
      return run_configs({{"", mid_spec}}, mid_out, "fig2_mid");
    }
    if (right->parsed()) {
      const std::vector<std::uint64_t> budgets =
          right_values.empty() ? std::vector<std::uint64_t>{100, 1000, 10000}
                               : to_counts64(right_values);
      std::vector<NamedSpec> configs;
      for (std::uint64_t m : {std::uint64_t{1}, std::uint64_t{10}, std::uint64_t{100}}) {
        ExperimentSpec spec = right_spec;
        spec.samples_per_particle = m;
        spec.sweep = lfpe::TotalBudgetSweep{m, budgets};
        configs.push_back({"m" + std::to_string(m), spec});
      }
      return run_configs(configs, right_out, "fig2_right");
    }
    if (fig3->parsed()) {
      auto& sweep = std::get<lfpe::AleToleranceSweep>(fig3_spec.sweep);
      sweep.particle_count = fig3_particles;
      if (!fig3_values.empty()) sweep.epsilons = fig3_values;
      return run_configs({{"", fig3_spec}}, fig3_out, "fig3");
    }
    // custom
    custom_spec.backend = lfpe::backend_from_name(custom_backend);
    custom_spec.samples_per_particle = custom_m;
    custom_spec.ale_epsilon = custom_epsilon;
    if (custom_sweep == "particles") {
      custom_spec.sweep = lfpe::ParticleCountSweep{to_particle_counts(custom_values)};
    } else if (custom_sweep == "samples") {
      custom_spec.sweep =
          lfpe::SamplesPerParticleSweep{custom_particles, to_counts64(custom_values)};
    } else if (custom_sweep == "budget") {
      custom_spec.sweep = lfpe::TotalBudgetSweep{custom_m, to_counts64(custom_values)};
    } else {
      custom_spec.sweep = lfpe::AleToleranceSweep{custom_particles, custom_values};
    }
    return run_configs({{"", custom_spec}}, custom_out, "custom");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
