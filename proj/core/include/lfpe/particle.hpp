#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <vector>

#include "lfpe/rng.hpp"

namespace lfpe {

class Prior;

// Point in model-parameter space.
struct ParamVector {
  std::vector<double> values;

  ParamVector() = default;
  ParamVector(std::initializer_list<double> init) : values(init) {}
  explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t dimension() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool all_finite() const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// Tolerance on the weight normalization invariant.
inline constexpr double kWeightSumTolerance = 1e-9;

// Weighted particle approximation of a distribution over parameters.
//
// Weights are non-negative, finite, and sum to one within kWeightSumTolerance.
// Positions are immutable and shared: a weight update produces a new cloud
// that aliases the same position vector, so per-datum updates cost O(n)
// regardless of parameter dimension.
class ParticleCloud {
 public:
  // Validates positions (finite, consistent dimension) and weights.
  ParticleCloud(std::vector<ParamVector> positions, std::vector<double> weights);

  // Reuses an already-validated position vector; only the weights are checked.
  ParticleCloud(std::shared_ptr<const std::vector<ParamVector>> positions,
                std::vector<double> weights);

  static ParticleCloud equal_weighted(std::vector<ParamVector> positions);

  std::size_t size() const { return weights_.size(); }
  std::size_t dimension() const { return positions_->empty() ? 0 : positions_->front().dimension(); }
  const std::vector<ParamVector>& positions() const { return *positions_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::shared_ptr<const std::vector<ParamVector>>& shared_positions() const {
    return positions_;
  }

 private:
  void check_weights() const;

  std::shared_ptr<const std::vector<ParamVector>> positions_;
  std::vector<double> weights_;
};

// 1 / sum(w_i^2): the number of equally weighted particles that would carry
// the same information.  Equals n for uniform weights, 1 for a point mass.
double effective_sample_size(const ParticleCloud& cloud);

// Equal-weighted cloud of n independent prior draws.
ParticleCloud init_cloud(const Prior& prior, std::size_t n, RngStream& rng);

}  // namespace lfpe
