#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lfpe/likelihood_free.hpp"
#include "lfpe/photodetector.hpp"
#include "lfpe/smc.hpp"

namespace lfpe {

// Which engine produces the per-trial estimate.
enum class BackendKind { kStrong, kSingleSample, kFixedM, kAle };

// Stable identifier used in serialized output and file-name suffixes.
std::string_view backend_name(BackendKind kind);

// Parse the inverse mapping; throws std::invalid_argument on unknown names.
BackendKind backend_from_name(std::string_view name);

// --- Sweep families ------------------------------------------------------
//
// A sweep fixes every experiment knob except one axis and reports accuracy
// and cost along it.

// Vary the particle count n.
struct ParticleCountSweep {
  std::vector<std::size_t> particle_counts;
};

// Vary the per-particle batch size m at fixed n (fixed-batch backend only).
struct SamplesPerParticleSweep {
  std::size_t particle_count = 100;
  std::vector<std::uint64_t> samples_per_particle;
};

// Vary the total per-datum simulation budget n*m at fixed m, so each budget
// buys n = budget / m particles (fixed-batch backend only).
struct TotalBudgetSweep {
  std::uint64_t samples_per_particle = 1;
  std::vector<std::uint64_t> budgets;
};

// Vary the adaptive estimator's accuracy tolerance at fixed n.
struct AleToleranceSweep {
  std::size_t particle_count = 100;
  std::vector<double> epsilons;
};

using SweepPlan = std::variant<ParticleCountSweep, SamplesPerParticleSweep, TotalBudgetSweep,
                               AleToleranceSweep>;

// Complete description of one experiment: detector noise, data volume, the
// backend, the swept axis, and every engine knob.  Values have the defaults
// used throughout; validate() checks cross-field consistency.
struct ExperimentSpec {
  double alpha = 0.9;
  double beta = 0.05;
  // Measurements per trial (data set size N).
  std::uint64_t measurements = 1000;
  // Independent repetitions per sweep point.
  std::uint64_t trials = 100;
  BackendKind backend = BackendKind::kSingleSample;
  SweepPlan sweep = ParticleCountSweep{{100}};
  // Batch size m when the backend is kFixedM and the sweep does not set it.
  std::uint64_t samples_per_particle = 1;
  // Adaptive tolerance; 0 means "resolve per point via default_ale_epsilon".
  double ale_epsilon = 0.0;
  double ale_gamma = 1.0;
  std::uint64_t ale_max_samples = 1'000'000;
  std::uint32_t zero_posterior_retries = 10;
  ResampleConfig resample;
  std::uint64_t master_seed = 42;
  // Estimate a fixed truth instead of drawing one per trial from the prior.
  std::optional<double> fixed_truth;
  // Override the prior's support; defaults to the model's parameter_range().
  std::optional<std::pair<double, double>> prior_support;
};

// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentSpec& spec);

// One sweep point with every per-trial knob resolved.
struct ResolvedPoint {
  std::size_t index = 0;
  double sweep_value = 0.0;
  BackendKind backend = BackendKind::kStrong;
  std::size_t particle_count = 0;
  std::uint64_t samples_per_particle = 1;
  double ale_epsilon = 0.0;
};

std::vector<ResolvedPoint> resolve_sweep(const ExperimentSpec& spec);

// Everything recorded about a single trial.
struct TrialRecord {
  double true_p = 0.0;
  double estimate = 0.0;
  double squared_error = 0.0;
  // Weak-simulator draws (0 for the exact-likelihood backend).
  std::uint64_t simulator_calls = 0;
  std::uint64_t measurements_used = 0;
  std::uint64_t resample_events = 0;
  std::uint64_t zero_posterior_events = 0;
  std::uint64_t ale_budget_hits = 0;
};

// One trial, fully reproducible: truth draw, data set, and engine streams are
// all derived from (master_seed, point.index, trial_index).
TrialRecord run_trial(const ExperimentSpec& spec, const ResolvedPoint& point,
                      std::uint64_t trial_index);

struct SweepPointResult {
  ResolvedPoint point;
  double mean_mse = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double mean_calls = 0.0;
  double bound = 0.0;
  std::vector<TrialRecord> trials;
};

struct SweepResult {
  ExperimentSpec spec;
  std::vector<SweepPointResult> points;
};

// Runs every (point, trial) pair and aggregates per point.  `jobs` caps the
// worker threads (0 = hardware concurrency); output is byte-identical for
// every jobs value because trials are seeded by index, not by schedule.
// Any trial failure aborts the sweep with that trial's annotated error.
SweepResult run_sweep(const ExperimentSpec& spec, unsigned jobs = 0);

// Least-squares slope of log(y) against log(x); needs >= 3 points with
// positive coordinates and at least two distinct x values.
double fit_loglog_slope(std::span<const std::pair<double, double>> points);

// Fixed-schema CSV: sweep_value,mean_mse,q25,q75,mean_calls,bound.
std::string sweep_csv(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, std::ostream& out);

// Full record including the resolved configuration; include_trials pulls in
// per-trial rows.
std::string sweep_json(const SweepResult& result, bool include_trials = false);

// The configuration alone, for inspection without running anything.
std::string spec_json(const ExperimentSpec& spec);

}  // namespace lfpe
