#include "lfpe/likelihood_free.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "lfpe/errors.hpp"

namespace lfpe {

double default_ale_epsilon(std::uint64_t measurement_count, std::size_t particle_count) {
  if (measurement_count == 0 || particle_count == 0) {
    throw std::invalid_argument("default_ale_epsilon: counts must be positive");
  }
  return 1.0 / static_cast<double>(measurement_count) + 1.0 / static_cast<double>(particle_count);
}

std::vector<double> single_sample_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                              Outcome datum, RngStream& rng,
                                              CallCounter& counter) {
  const std::size_t n = cloud.size();
  const std::vector<ParamVector>& xs = cloud.positions();
  std::vector<double> estimates(n);
  for (std::size_t k = 0; k < n; ++k) {
    RngStream particle_rng = rng.derive(k);
    estimates[k] = model.sample(xs[k], particle_rng) == datum ? 1.0 : 0.0;
  }
  counter.add(n);
  return estimates;
}

std::vector<double> fixed_m_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                        Outcome datum, std::uint64_t samples_per_particle,
                                        RngStream& rng, CallCounter& counter) {
  if (samples_per_particle == 0) {
    throw std::invalid_argument("fixed_m_likelihoods: samples_per_particle must be positive");
  }
  const std::size_t n = cloud.size();
  const std::vector<ParamVector>& xs = cloud.positions();
  std::vector<double> estimates(n);
  for (std::size_t k = 0; k < n; ++k) {
    RngStream particle_rng = rng.derive(k);
    std::uint64_t matches = 0;
    for (std::uint64_t draw = 0; draw < samples_per_particle; ++draw) {
      matches += model.sample(xs[k], particle_rng) == datum ? 1u : 0u;
    }
    estimates[k] = static_cast<double>(matches) / static_cast<double>(samples_per_particle);
  }
  counter.add(n * samples_per_particle);
  return estimates;
}

std::vector<double> ale_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                    Outcome datum, double epsilon, double gamma,
                                    std::uint64_t max_samples, RngStream& rng,
                                    CallCounter& counter, std::uint64_t* budget_hits) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ale_likelihoods: epsilon must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("ale_likelihoods: gamma must be positive");
  if (max_samples == 0) {
    throw BudgetExhaustedError("ale_likelihoods: max_samples must allow at least one draw");
  }
  const double eps_sq = epsilon * epsilon;
  const std::size_t n = cloud.size();
  const std::vector<ParamVector>& xs = cloud.positions();
  std::vector<double> estimates(n);
  std::uint64_t total_draws = 0;
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    RngStream particle_rng = rng.derive(k);
    std::uint64_t draws = 0;
    std::uint64_t matches = 0;
    for (;;) {
      matches += model.sample(xs[k], particle_rng) == datum ? 1u : 0u;
      ++draws;
      if (beta_posterior_variance(matches, draws, gamma) < eps_sq) break;
      if (draws >= max_samples) {
        ++hits;
        break;
      }
    }
    estimates[k] = add_gamma_estimate(matches, draws, gamma);
    total_draws += draws;
  }
  counter.add(total_draws);
  if (budget_hits != nullptr) *budget_hits += hits;
  return estimates;
}

namespace {

std::vector<double> backend_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                        Outcome datum, const BackendConfig& backend,
                                        RngStream& rng, LfpeRunResult& result) {
  return std::visit(
      [&](const auto& kind) -> std::vector<double> {
        using Kind = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<Kind, SingleSampleBackend>) {
          return single_sample_likelihoods(model, cloud, datum, rng, result.calls);
        } else if constexpr (std::is_same_v<Kind, FixedMBackend>) {
          return fixed_m_likelihoods(model, cloud, datum, kind.samples_per_particle, rng,
                                     result.calls);
        } else {
          return ale_likelihoods(model, cloud, datum, kind.epsilon, kind.gamma, kind.max_samples,
                                 rng, result.calls, &result.ale_budget_hits);
        }
      },
      backend.kind);
}

}  // namespace

LfpeRunResult run_lfpe(const WeakModel& model, const Prior& prior, std::span<const Outcome> data,
                       std::size_t particle_count, const BackendConfig& backend,
                       const ResampleConfig& resample_cfg, RngStream& rng) {
  if (data.empty()) throw std::invalid_argument("run_lfpe: data must be non-empty");
  validate(resample_cfg);

  RngStream init_rng = rng.derive(0);
  ParticleCloud cloud = init_cloud(prior, particle_count, init_rng);

  LfpeRunResult result;
  const double ess_floor =
      resample_cfg.ess_threshold_fraction * static_cast<double>(particle_count);
  for (std::size_t j = 0; j < data.size(); ++j) {
    RngStream datum_rng = rng.derive(1 + j);

    // Attempt 0 is the regular estimate; each retry re-draws the whole
    // likelihood vector from a fresh substream.
    bool updated = false;
    for (std::uint32_t attempt = 0; attempt <= backend.zero_posterior_retries; ++attempt) {
      RngStream attempt_rng = datum_rng.derive(1 + attempt);
      if (attempt > 0) ++result.zero_posterior_retry_attempts;
      const std::vector<double> estimates =
          backend_likelihoods(model, cloud, data[j], backend, attempt_rng, result);
      try {
        cloud = bayes_update(cloud, estimates);
        updated = true;
        break;
      } catch (const ZeroPosteriorError&) {
        continue;
      }
    }
    if (!updated) {
      // Recovery of last resort: keep the positions, flatten the weights.
      ++result.zero_posterior_events;
      cloud = ParticleCloud(
          cloud.shared_positions(),
          std::vector<double>(particle_count, 1.0 / static_cast<double>(particle_count)));
    }

    if (effective_sample_size(cloud) < ess_floor) {
      RngStream resample_rng = datum_rng.derive(0);
      cloud = liu_west_resample(cloud, prior, resample_cfg, resample_rng);
      ++result.resample_events;
    }
  }
  result.summary = posterior_summary(cloud);
  return result;
}

}  // namespace lfpe
