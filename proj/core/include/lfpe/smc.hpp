#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lfpe/model.hpp"
#include "lfpe/particle.hpp"
#include "lfpe/prior.hpp"
#include "lfpe/rng.hpp"

namespace lfpe {

// Resampling policy: when to trigger and how hard Liu-West shrinks.
struct ResampleConfig {
  // Resample once ESS falls below this fraction of the particle count.
  double ess_threshold_fraction = 0.5;
  // Liu-West shrinkage coefficient a in (0, 1]; perturbation variance is
  // (1 - a^2) times the posterior covariance, so a = 1 copies ancestors.
  double liu_west_a = 0.98;
};

// Throws std::invalid_argument when a field is out of range.
void validate(const ResampleConfig& cfg);

// First two moments of a particle cloud.
struct PosteriorSummary {
  ParamVector mean;
  Eigen::MatrixXd covariance;

  double variance(std::size_t dim = 0) const { return covariance(dim, dim); }
};

// One Bayes step: scale each weight by its particle's likelihood for the new
// datum and renormalize.  Throws ZeroPosteriorError when all products vanish.
ParticleCloud bayes_update(const ParticleCloud& cloud, std::span<const double> likelihoods);

// Weighted mean and covariance; the covariance is symmetric by construction.
PosteriorSummary posterior_summary(const ParticleCloud& cloud);

// Unconditional Liu-West resample: ancestors drawn by weight, positions
// shrunk toward the cloud mean and perturbed with matched covariance, then
// clipped to the prior's support box.  Returns an equal-weighted cloud with
// mean and covariance approximately preserved.
ParticleCloud liu_west_resample(const ParticleCloud& cloud, const Prior& prior,
                                const ResampleConfig& cfg, RngStream& rng);

// Resample only when ESS < ess_threshold_fraction * n; otherwise returns the
// cloud unchanged.
ParticleCloud maybe_resample(const ParticleCloud& cloud, const Prior& prior,
                             const ResampleConfig& cfg, RngStream& rng);

struct StrongRunResult {
  PosteriorSummary summary;
  std::uint64_t resample_events = 0;
};

// Full filtering pass with exact likelihoods: for each datum in order, weight
// update then conditional resample.  Draw streams are derived from `rng` per
// datum, so results do not depend on scheduling.
StrongRunResult run_strong(const StrongModel& model, const Prior& prior,
                           std::span<const Outcome> data, std::size_t particle_count,
                           const ResampleConfig& cfg, RngStream& rng);

}  // namespace lfpe
