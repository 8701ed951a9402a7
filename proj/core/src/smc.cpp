#include "lfpe/smc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "lfpe/errors.hpp"

namespace lfpe {

void validate(const ResampleConfig& cfg) {
  if (!(cfg.ess_threshold_fraction > 0.0) || !(cfg.ess_threshold_fraction <= 1.0)) {
    throw std::invalid_argument("ResampleConfig: ess_threshold_fraction must be in (0, 1]");
  }
  if (!(cfg.liu_west_a > 0.0) || !(cfg.liu_west_a <= 1.0)) {
    throw std::invalid_argument("ResampleConfig: liu_west_a must be in (0, 1]");
  }
}

ParticleCloud bayes_update(const ParticleCloud& cloud, std::span<const double> likelihoods) {
  const std::size_t n = cloud.size();
  if (likelihoods.size() != n) {
    throw std::invalid_argument("bayes_update: one likelihood per particle required");
  }
  std::vector<double> weights(n);
  double total = 0.0;
  const std::vector<double>& w = cloud.weights();
  for (std::size_t k = 0; k < n; ++k) {
    const double lk = likelihoods[k];
    if (!(lk >= 0.0) || !std::isfinite(lk)) {
      throw std::invalid_argument("bayes_update: likelihoods must be finite and non-negative");
    }
    weights[k] = w[k] * lk;
    total += weights[k];
  }
  if (!(total > 0.0)) {
    throw ZeroPosteriorError("bayes_update: all posterior weights vanished");
  }
  for (double& wk : weights) wk /= total;
  return ParticleCloud(cloud.shared_positions(), std::move(weights));
}

PosteriorSummary posterior_summary(const ParticleCloud& cloud) {
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dimension();
  const std::vector<ParamVector>& xs = cloud.positions();
  const std::vector<double>& w = cloud.weights();

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) mean(static_cast<Eigen::Index>(i)) += w[k] * xs[k][i];
  }

  Eigen::MatrixXd cov =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd centered(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      centered(static_cast<Eigen::Index>(i)) = xs[k][i] - mean(static_cast<Eigen::Index>(i));
    }
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, w[k]);
  }
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();

  PosteriorSummary summary;
  summary.mean.values.assign(mean.data(), mean.data() + mean.size());
  summary.covariance = std::move(cov);
  return summary;
}

ParticleCloud liu_west_resample(const ParticleCloud& cloud, const Prior& prior,
                                const ResampleConfig& cfg, RngStream& rng) {
  validate(cfg);
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dimension();
  if (prior.dimension() != d) {
    throw std::invalid_argument("liu_west_resample: prior/cloud dimension mismatch");
  }

  const PosteriorSummary pre = posterior_summary(cloud);
  const double a = cfg.liu_west_a;
  const double perturb_var = 1.0 - a * a;

  Eigen::MatrixXd scaled_chol;
  if (perturb_var > 0.0) {
    Eigen::MatrixXd cov = 0.5 * (pre.covariance + pre.covariance.transpose());
    cov.diagonal().array() += 1e-12;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw DegenerateCovarianceError("liu_west_resample: covariance not factorizable");
    }
    scaled_chol = std::sqrt(perturb_var) * Eigen::MatrixXd(llt.matrixL());
  }

  // Inverse-CDF lookup over the cumulative weights picks each ancestor.
  std::vector<double> cumulative(n);
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running += cloud.weights()[k];
    cumulative[k] = running;
  }
  const double total = running;

  const std::vector<ParamVector>& xs = cloud.positions();
  std::vector<ParamVector> fresh;
  fresh.reserve(n);
  Eigen::VectorXd noise(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_double() * total;
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (j >= n) j = n - 1;

    ParamVector x = xs[j];
    for (std::size_t dim = 0; dim < d; ++dim) {
      x[dim] = a * x[dim] + (1.0 - a) * pre.mean[dim];
    }
    if (perturb_var > 0.0) {
      for (Eigen::Index dim = 0; dim < noise.size(); ++dim) noise(dim) = rng.next_normal();
      const Eigen::VectorXd step = scaled_chol * noise;
      for (std::size_t dim = 0; dim < d; ++dim) x[dim] += step(static_cast<Eigen::Index>(dim));
    }
    for (std::size_t dim = 0; dim < d; ++dim) {
      const auto [lo, hi] = prior.support(dim);
      x[dim] = std::clamp(x[dim], lo, hi);
    }
    fresh.push_back(std::move(x));
  }
  return ParticleCloud::equal_weighted(std::move(fresh));
}

ParticleCloud maybe_resample(const ParticleCloud& cloud, const Prior& prior,
                             const ResampleConfig& cfg, RngStream& rng) {
  validate(cfg);
  const double ess = effective_sample_size(cloud);
  if (ess >= cfg.ess_threshold_fraction * static_cast<double>(cloud.size())) {
    return cloud;
  }
  return liu_west_resample(cloud, prior, cfg, rng);
}

StrongRunResult run_strong(const StrongModel& model, const Prior& prior,
                           std::span<const Outcome> data, std::size_t particle_count,
                           const ResampleConfig& cfg, RngStream& rng) {
  validate(cfg);
  if (data.empty()) throw std::invalid_argument("run_strong: data must be non-empty");

  RngStream init_rng = rng.derive(0);
  ParticleCloud cloud = init_cloud(prior, particle_count, init_rng);

  StrongRunResult result;
  std::vector<double> likelihoods(particle_count);
  const double ess_floor = cfg.ess_threshold_fraction * static_cast<double>(particle_count);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const std::vector<ParamVector>& xs = cloud.positions();
    for (std::size_t k = 0; k < particle_count; ++k) {
      likelihoods[k] = model.likelihood(data[j], xs[k]);
    }
    cloud = bayes_update(cloud, likelihoods);
    if (effective_sample_size(cloud) < ess_floor) {
      RngStream resample_rng = rng.derive(1 + j).derive(0);
      cloud = liu_west_resample(cloud, prior, cfg, resample_rng);
      ++result.resample_events;
    }
  }
  result.summary = posterior_summary(cloud);
  return result;
}

}  // namespace lfpe
