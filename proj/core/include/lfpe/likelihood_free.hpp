#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lfpe/model.hpp"
#include "lfpe/particle.hpp"
#include "lfpe/prior.hpp"
#include "lfpe/smc.hpp"

namespace lfpe {

// One simulator draw per particle per datum; the 0/1 match indicator feeds
// the weight update directly.
struct SingleSampleBackend {};

// Fixed batch of draws per particle per datum; the likelihood estimate is the
// match frequency.
struct FixedMBackend {
  std::uint64_t samples_per_particle = 1;
};

// Adaptive batch: keep drawing until the Beta-posterior standard deviation of
// the match probability falls below epsilon, or the per-particle budget runs
// out.  The estimate is the hedged frequency (k + gamma) / (m + 2 gamma).
struct AleBackend {
  double epsilon = 0.05;
  double gamma = 1.0;
  std::uint64_t max_samples = 1'000'000;
};

// Which estimator feeds the weight updates, plus how many fresh re-draws to
// attempt when an estimated likelihood vector comes back identically zero.
struct BackendConfig {
  std::variant<SingleSampleBackend, FixedMBackend, AleBackend> kind = SingleSampleBackend{};
  std::uint32_t zero_posterior_retries = 10;
};

// Running total of weak-simulator invocations, the cost unit for every
// efficiency comparison.
class CallCounter {
 public:
  void add(std::uint64_t calls) { total_ += calls; }
  std::uint64_t total() const { return total_; }

 private:
  std::uint64_t total_ = 0;
};

// Hedged estimate (k + gamma) / (m + 2 gamma) of a match probability from k
// matches in m draws; gamma = 0 reduces to the raw frequency.
inline double add_gamma_estimate(std::uint64_t matches, std::uint64_t trials, double gamma) {
  if (matches > trials) {
    throw std::invalid_argument("add_gamma_estimate: matches cannot exceed trials");
  }
  const double denom = static_cast<double>(trials) + 2.0 * gamma;
  if (!(gamma >= 0.0) || !(denom > 0.0)) {
    throw std::invalid_argument("add_gamma_estimate: gamma must be non-negative (and positive "
                                "when trials is zero)");
  }
  return (static_cast<double>(matches) + gamma) / denom;
}

// Posterior variance of the match probability under a Beta(gamma, gamma)
// prior after k matches in m draws:
//   (k + gamma)(m - k + gamma) / ((m + 2 gamma)^2 (m + 2 gamma + 1)).
inline double beta_posterior_variance(std::uint64_t matches, std::uint64_t trials, double gamma) {
  if (matches > trials) {
    throw std::invalid_argument("beta_posterior_variance: matches cannot exceed trials");
  }
  const double m = static_cast<double>(trials);
  const double k = static_cast<double>(matches);
  const double denom = m + 2.0 * gamma;
  if (!(gamma >= 0.0) || !(denom > 0.0)) {
    throw std::invalid_argument("beta_posterior_variance: gamma must be non-negative (and "
                                "positive when trials is zero)");
  }
  return (k + gamma) * (m - k + gamma) / (denom * denom * (denom + 1.0));
}

// Accuracy beyond the posterior's own scale is wasted: 1/N covers the
// per-datum resolution after N measurements and 1/n the weight resolution of
// an n-particle cloud.
double default_ale_epsilon(std::uint64_t measurement_count, std::size_t particle_count);

// One estimated likelihood per particle for `datum`.  Per-particle draw
// streams are derived from `rng` by particle index, so estimates do not
// depend on evaluation order.  Each routine adds its simulator draws to
// `counter`.
std::vector<double> single_sample_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                              Outcome datum, RngStream& rng, CallCounter& counter);

std::vector<double> fixed_m_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                        Outcome datum, std::uint64_t samples_per_particle,
                                        RngStream& rng, CallCounter& counter);

// Stops at the first m where beta_posterior_variance(k, m, gamma) < epsilon^2
// (at least one draw, at most max_samples).  Particles that exhaust the
// budget are tallied into *budget_hits when it is non-null.
std::vector<double> ale_likelihoods(const WeakModel& model, const ParticleCloud& cloud,
                                    Outcome datum, double epsilon, double gamma,
                                    std::uint64_t max_samples, RngStream& rng,
                                    CallCounter& counter, std::uint64_t* budget_hits = nullptr);

struct LfpeRunResult {
  PosteriorSummary summary;
  CallCounter calls;
  std::uint64_t resample_events = 0;
  // Data steps that fell back to uniform weights after every re-draw of the
  // likelihood vector came back all-zero.
  std::uint64_t zero_posterior_events = 0;
  // Extra likelihood-vector draws spent on those recoveries.
  std::uint64_t zero_posterior_retry_attempts = 0;
  // Adaptive-estimator particles stopped by max_samples instead of epsilon.
  std::uint64_t ale_budget_hits = 0;
};

// Full filtering pass against a sample-only simulator: for each datum,
// estimate per-particle likelihoods with the configured backend, update
// weights, recover from all-zero estimates, and conditionally resample.
LfpeRunResult run_lfpe(const WeakModel& model, const Prior& prior, std::span<const Outcome> data,
                       std::size_t particle_count, const BackendConfig& backend,
                       const ResampleConfig& resample_cfg, RngStream& rng);

}  // namespace lfpe
