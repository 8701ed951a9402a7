#include "lfpe/particle.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "lfpe/prior.hpp"

namespace lfpe {

bool ParamVector::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

std::shared_ptr<const std::vector<ParamVector>> validate_positions(
    std::vector<ParamVector> positions) {
  if (positions.empty()) {
    throw std::invalid_argument("ParticleCloud: positions must be non-empty");
  }
  const std::size_t dim = positions.front().dimension();
  for (const ParamVector& x : positions) {
    if (x.dimension() != dim) {
      throw std::invalid_argument("ParticleCloud: inconsistent parameter dimension");
    }
    if (!x.all_finite()) {
      throw std::invalid_argument("ParticleCloud: non-finite particle position");
    }
  }
  return std::make_shared<const std::vector<ParamVector>>(std::move(positions));
}

}  // namespace

ParticleCloud::ParticleCloud(std::vector<ParamVector> positions, std::vector<double> weights)
    : positions_(validate_positions(std::move(positions))), weights_(std::move(weights)) {
  check_weights();
}

ParticleCloud::ParticleCloud(std::shared_ptr<const std::vector<ParamVector>> positions,
                             std::vector<double> weights)
    : positions_(std::move(positions)), weights_(std::move(weights)) {
  if (!positions_ || positions_->empty()) {
    throw std::invalid_argument("ParticleCloud: positions must be non-empty");
  }
  check_weights();
}

ParticleCloud ParticleCloud::equal_weighted(std::vector<ParamVector> positions) {
  const std::size_t n = positions.size();
  if (n == 0) throw std::invalid_argument("ParticleCloud: positions must be non-empty");
  return ParticleCloud(std::move(positions), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void ParticleCloud::check_weights() const {
  if (weights_.size() != positions_->size()) {
    throw std::invalid_argument("ParticleCloud: positions/weights size mismatch");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("ParticleCloud: weights must be finite and non-negative");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("ParticleCloud: weights must sum to one");
  }
}

double effective_sample_size(const ParticleCloud& cloud) {
  double sum_sq = 0.0;
  for (double w : cloud.weights()) sum_sq += w * w;
  return 1.0 / sum_sq;
}

ParticleCloud init_cloud(const Prior& prior, std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("init_cloud: particle count must be positive");
  std::vector<ParamVector> positions;
  positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) positions.push_back(prior.sample(rng));
  return ParticleCloud::equal_weighted(std::move(positions));
}

}  // namespace lfpe
