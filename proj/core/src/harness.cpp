#include "lfpe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

namespace lfpe {

namespace {

// Shortest round-trippable decimal for doubles in serialized output.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Linear-interpolation quantile of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted.front();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

[[noreturn]] void invalid_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("ExperimentSpec: " + field + " " + why);
}

}  // namespace

std::string_view backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kStrong: return "strong";
    case BackendKind::kSingleSample: return "single_sample";
    case BackendKind::kFixedM: return "fixed_m";
    case BackendKind::kAle: return "ale";
  }
  throw std::invalid_argument("backend_name: unknown backend");
}

BackendKind backend_from_name(std::string_view name) {
  if (name == "strong") return BackendKind::kStrong;
  if (name == "single_sample") return BackendKind::kSingleSample;
  if (name == "fixed_m") return BackendKind::kFixedM;
  if (name == "ale") return BackendKind::kAle;
  throw std::invalid_argument("backend_from_name: unknown backend '" + std::string(name) + "'");
}

void validate(const ExperimentSpec& spec) {
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) invalid_field("alpha", "must lie in [0, 1]");
  if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) invalid_field("beta", "must lie in [0, 1]");
  if (spec.alpha + spec.beta == 1.0) {
    invalid_field("alpha/beta", "must not sum to 1 (parameter would be unidentifiable)");
  }
  if (spec.measurements == 0) invalid_field("measurements", "must be positive");
  if (spec.trials == 0) invalid_field("trials", "must be positive");
  if (spec.samples_per_particle == 0) invalid_field("samples_per_particle", "must be positive");
  if (!(spec.ale_epsilon >= 0.0) || !std::isfinite(spec.ale_epsilon)) {
    invalid_field("ale_epsilon", "must be finite and non-negative");
  }
  if (!(spec.ale_gamma > 0.0) || !std::isfinite(spec.ale_gamma)) {
    invalid_field("ale_gamma", "must be finite and positive");
  }
  if (spec.ale_max_samples == 0) invalid_field("ale_max_samples", "must be positive");
  validate(spec.resample);
  if (spec.prior_support) {
    const auto [lo, hi] = *spec.prior_support;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      invalid_field("prior_support", "must be a finite interval with lo < hi");
    }
  }
  if (spec.fixed_truth && !std::isfinite(*spec.fixed_truth)) {
    invalid_field("fixed_truth", "must be finite");
  }

  std::visit(
      [&](const auto& sweep) {
        using Sweep = std::decay_t<decltype(sweep)>;
        if constexpr (std::is_same_v<Sweep, ParticleCountSweep>) {
          if (sweep.particle_counts.empty()) invalid_field("particle_counts", "must be non-empty");
          for (std::size_t n : sweep.particle_counts) {
            if (n == 0) invalid_field("particle_counts", "entries must be positive");
          }
        } else if constexpr (std::is_same_v<Sweep, SamplesPerParticleSweep>) {
          if (spec.backend != BackendKind::kFixedM) {
            invalid_field("backend", "must be fixed_m for a samples-per-particle sweep");
          }
          if (sweep.particle_count == 0) invalid_field("particle_count", "must be positive");
          if (sweep.samples_per_particle.empty()) {
            invalid_field("samples_per_particle", "must be non-empty");
          }
          for (std::uint64_t m : sweep.samples_per_particle) {
            if (m == 0) invalid_field("samples_per_particle", "entries must be positive");
          }
        } else if constexpr (std::is_same_v<Sweep, TotalBudgetSweep>) {
          if (spec.backend != BackendKind::kFixedM) {
            invalid_field("backend", "must be fixed_m for a total-budget sweep");
          }
          if (sweep.samples_per_particle == 0) {
            invalid_field("samples_per_particle", "must be positive");
          }
          if (sweep.budgets.empty()) invalid_field("budgets", "must be non-empty");
          for (std::uint64_t budget : sweep.budgets) {
            if (budget == 0 || budget % sweep.samples_per_particle != 0) {
              invalid_field("budgets",
                            "entries must be positive multiples of samples_per_particle");
            }
          }
        } else {
          if (spec.backend != BackendKind::kAle) {
            invalid_field("backend", "must be ale for a tolerance sweep");
          }
          if (sweep.particle_count == 0) invalid_field("particle_count", "must be positive");
          if (sweep.epsilons.empty()) invalid_field("epsilons", "must be non-empty");
          for (double eps : sweep.epsilons) {
            if (!(eps > 0.0) || !std::isfinite(eps)) {
              invalid_field("epsilons", "entries must be finite and positive");
            }
          }
        }
      },
      spec.sweep);
}

std::vector<ResolvedPoint> resolve_sweep(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<ResolvedPoint> points;

  const auto resolved_epsilon = [&spec](std::size_t particle_count) {
    return spec.ale_epsilon > 0.0 ? spec.ale_epsilon
                                  : default_ale_epsilon(spec.measurements, particle_count);
  };

  std::visit(
      [&](const auto& sweep) {
        using Sweep = std::decay_t<decltype(sweep)>;
        if constexpr (std::is_same_v<Sweep, ParticleCountSweep>) {
          for (std::size_t n : sweep.particle_counts) {
            ResolvedPoint point;
            point.sweep_value = static_cast<double>(n);
            point.backend = spec.backend;
            point.particle_count = n;
            point.samples_per_particle = spec.samples_per_particle;
            point.ale_epsilon = spec.backend == BackendKind::kAle ? resolved_epsilon(n) : 0.0;
            points.push_back(point);
          }
        } else if constexpr (std::is_same_v<Sweep, SamplesPerParticleSweep>) {
          for (std::uint64_t m : sweep.samples_per_particle) {
            ResolvedPoint point;
            point.sweep_value = static_cast<double>(m);
            point.backend = BackendKind::kFixedM;
            point.particle_count = sweep.particle_count;
            point.samples_per_particle = m;
            points.push_back(point);
          }
        } else if constexpr (std::is_same_v<Sweep, TotalBudgetSweep>) {
          for (std::uint64_t budget : sweep.budgets) {
            ResolvedPoint point;
            point.sweep_value = static_cast<double>(budget);
            point.backend = BackendKind::kFixedM;
            point.particle_count = static_cast<std::size_t>(budget / sweep.samples_per_particle);
            point.samples_per_particle = sweep.samples_per_particle;
            points.push_back(point);
          }
        } else {
          for (double eps : sweep.epsilons) {
            ResolvedPoint point;
            point.sweep_value = eps;
            point.backend = BackendKind::kAle;
            point.particle_count = sweep.particle_count;
            point.ale_epsilon = eps;
            points.push_back(point);
          }
        }
      },
      spec.sweep);

  for (std::size_t i = 0; i < points.size(); ++i) points[i].index = i;
  return points;
}

TrialRecord run_trial(const ExperimentSpec& spec, const ResolvedPoint& point,
                      std::uint64_t trial_index) {
  try {
    const PhotodetectorModel model(spec.alpha, spec.beta);
    const auto [lo, hi] = spec.prior_support ? *spec.prior_support : model.parameter_range();
    const UniformBoxPrior prior(lo, hi);

    // Trial identity fixes every random draw: truth, data, and engine.
    const RngStream root(spec.master_seed);
    const RngStream trial_rng = root.derive(point.index).derive(trial_index);
    RngStream truth_rng = trial_rng.derive(0);
    RngStream data_rng = trial_rng.derive(1);
    RngStream engine_rng = trial_rng.derive(2);

    const double truth = spec.fixed_truth ? *spec.fixed_truth : prior.sample(truth_rng)[0];
    const PhotodetectorWeak weak = weak_interface(model);
    const ParamVector truth_params{truth};
    std::vector<Outcome> data(spec.measurements);
    for (Outcome& datum : data) datum = weak.sample(truth_params, data_rng);

    TrialRecord record;
    record.true_p = truth;
    record.measurements_used = spec.measurements;

    if (point.backend == BackendKind::kStrong) {
      const PhotodetectorStrong strong = strong_interface(model);
      const StrongRunResult run =
          run_strong(strong, prior, data, point.particle_count, spec.resample, engine_rng);
      record.estimate = run.summary.mean[0];
      record.resample_events = run.resample_events;
    } else {
      BackendConfig backend;
      backend.zero_posterior_retries = spec.zero_posterior_retries;
      switch (point.backend) {
        case BackendKind::kSingleSample:
          backend.kind = SingleSampleBackend{};
          break;
        case BackendKind::kFixedM:
          backend.kind = FixedMBackend{point.samples_per_particle};
          break;
        case BackendKind::kAle:
          backend.kind = AleBackend{point.ale_epsilon, spec.ale_gamma, spec.ale_max_samples};
          break;
        case BackendKind::kStrong:
          break;  // handled above
      }
      const LfpeRunResult run =
          run_lfpe(weak, prior, data, point.particle_count, backend, spec.resample, engine_rng);
      record.estimate = run.summary.mean[0];
      record.simulator_calls = run.calls.total();
      record.resample_events = run.resample_events;
      record.zero_posterior_events = run.zero_posterior_events;
      record.ale_budget_hits = run.ale_budget_hits;
    }

    const double error = record.estimate - record.true_p;
    record.squared_error = error * error;
    return record;
  } catch (const std::exception& e) {
    throw std::runtime_error("run_trial: sweep point " + std::to_string(point.index) + " (value " +
                             format_double(point.sweep_value) + "), trial " +
                             std::to_string(trial_index) + ": " + e.what());
  }
}

SweepResult run_sweep(const ExperimentSpec& spec, unsigned jobs) {
  const std::vector<ResolvedPoint> points = resolve_sweep(spec);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t total = points.size() * trials;

  std::vector<TrialRecord> records(total);
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));

  // Work queue over (point, trial) pairs; records land at fixed indices so
  // every schedule produces the same bytes.
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= total) return;
      try {
        records[i] = run_trial(spec, points[i / trials], i % trials);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) std::rethrow_exception(first_error);

  const PhotodetectorModel model(spec.alpha, spec.beta);
  const double bound = model.asymptotic_mse_bound(spec.measurements);

  SweepResult result;
  result.spec = spec;
  result.points.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    SweepPointResult point_result;
    point_result.point = points[p];
    point_result.bound = bound;
    point_result.trials.assign(records.begin() + static_cast<std::ptrdiff_t>(p * trials),
                               records.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials));

    std::vector<double> squared_errors(trials);
    double mse_sum = 0.0;
    double call_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      squared_errors[t] = point_result.trials[t].squared_error;
      mse_sum += squared_errors[t];
      call_sum += static_cast<double>(point_result.trials[t].simulator_calls);
    }
    std::sort(squared_errors.begin(), squared_errors.end());
    point_result.mean_mse = mse_sum / static_cast<double>(trials);
    point_result.mean_calls = call_sum / static_cast<double>(trials);
    point_result.q25 = quantile_sorted(squared_errors, 0.25);
    point_result.median = quantile_sorted(squared_errors, 0.5);
    point_result.q75 = quantile_sorted(squared_errors, 0.75);
    result.points.push_back(std::move(point_result));
  }
  return result;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_loglog_slope: at least three points required");
  }
  double mean_lx = 0.0;
  double mean_ly = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("fit_loglog_slope: coordinates must be positive");
    }
    mean_lx += std::log(x);
    mean_ly += std::log(y);
  }
  const double count = static_cast<double>(points.size());
  mean_lx /= count;
  mean_ly /= count;

  double covariance = 0.0;
  double variance = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mean_lx;
    covariance += dx * (std::log(y) - mean_ly);
    variance += dx * dx;
  }
  if (!(variance > 0.0)) {
    throw std::invalid_argument("fit_loglog_slope: at least two distinct x values required");
  }
  return covariance / variance;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "sweep_value,mean_mse,q25,q75,mean_calls,bound\n";
  for (const SweepPointResult& point : result.points) {
    out += format_double(point.point.sweep_value);
    out += ',';
    out += format_double(point.mean_mse);
    out += ',';
    out += format_double(point.q25);
    out += ',';
    out += format_double(point.q75);
    out += ',';
    out += format_double(point.mean_calls);
    out += ',';
    out += format_double(point.bound);
    out += '\n';
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) { out << sweep_csv(result); }

namespace {

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  using nlohmann::json;

  json sweep_desc;
  std::visit(
      [&](const auto& sweep) {
        using Sweep = std::decay_t<decltype(sweep)>;
        if constexpr (std::is_same_v<Sweep, ParticleCountSweep>) {
          sweep_desc["kind"] = "particle_count";
          sweep_desc["values"] = sweep.particle_counts;
        } else if constexpr (std::is_same_v<Sweep, SamplesPerParticleSweep>) {
          sweep_desc["kind"] = "samples_per_particle";
          sweep_desc["particle_count"] = sweep.particle_count;
          sweep_desc["values"] = sweep.samples_per_particle;
        } else if constexpr (std::is_same_v<Sweep, TotalBudgetSweep>) {
          sweep_desc["kind"] = "total_budget";
          sweep_desc["samples_per_particle"] = sweep.samples_per_particle;
          sweep_desc["values"] = sweep.budgets;
        } else {
          sweep_desc["kind"] = "ale_tolerance";
          sweep_desc["particle_count"] = sweep.particle_count;
          sweep_desc["values"] = sweep.epsilons;
        }
      },
      spec.sweep);

  json doc;
  doc["alpha"] = spec.alpha;
  doc["beta"] = spec.beta;
  doc["measurements"] = spec.measurements;
  doc["trials"] = spec.trials;
  doc["backend"] = std::string(backend_name(spec.backend));
  doc["sweep"] = sweep_desc;
  doc["samples_per_particle"] = spec.samples_per_particle;
  doc["ale"] = {{"epsilon", spec.ale_epsilon},
                {"gamma", spec.ale_gamma},
                {"max_samples", spec.ale_max_samples}};
  doc["zero_posterior_retries"] = spec.zero_posterior_retries;
  doc["resample"] = {{"ess_threshold_fraction", spec.resample.ess_threshold_fraction},
                     {"liu_west_a", spec.resample.liu_west_a}};
  doc["master_seed"] = spec.master_seed;
  if (spec.fixed_truth) doc["fixed_truth"] = *spec.fixed_truth;
  if (spec.prior_support) {
    doc["prior_support"] = {spec.prior_support->first, spec.prior_support->second};
  }
  return doc;
}

}  // namespace

std::string spec_json(const ExperimentSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

std::string sweep_json(const SweepResult& result, bool include_trials) {
  using nlohmann::json;
  json doc = spec_to_json(result.spec);

  json points = json::array();
  for (const SweepPointResult& point : result.points) {
    json entry;
    entry["sweep_value"] = point.point.sweep_value;
    entry["backend"] = std::string(backend_name(point.point.backend));
    entry["particle_count"] = point.point.particle_count;
    if (point.point.backend == BackendKind::kFixedM) {
      entry["samples_per_particle"] = point.point.samples_per_particle;
    }
    if (point.point.backend == BackendKind::kAle) {
      entry["ale_epsilon"] = point.point.ale_epsilon;
    }
    entry["mean_mse"] = point.mean_mse;
    entry["q25"] = point.q25;
    entry["median"] = point.median;
    entry["q75"] = point.q75;
    entry["mean_calls"] = point.mean_calls;
    entry["bound"] = point.bound;
    if (include_trials) {
      json trials = json::array();
      for (const TrialRecord& trial : point.trials) {
        trials.push_back({{"true_p", trial.true_p},
                          {"estimate", trial.estimate},
                          {"squared_error", trial.squared_error},
                          {"simulator_calls", trial.simulator_calls},
                          {"measurements_used", trial.measurements_used},
                          {"resample_events", trial.resample_events},
                          {"zero_posterior_events", trial.zero_posterior_events},
                          {"ale_budget_hits", trial.ale_budget_hits}});
      }
      entry["trials"] = std::move(trials);
    }
    points.push_back(std::move(entry));
  }
  doc["points"] = std::move(points);
  return doc.dump(2) + "\n";
}

}  // namespace lfpe
