#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lfpe/particle.hpp"
#include "lfpe/rng.hpp"

namespace lfpe {

// Prior distribution over parameters with box-bounded support.  The support
// bounds double as the clipping box for resampled particles.
class Prior {
 public:
  virtual ~Prior() = default;

  virtual std::size_t dimension() const = 0;

  // Closed support interval [lo, hi] of coordinate `dim`.
  virtual std::pair<double, double> support(std::size_t dim) const = 0;

  // One draw from the prior; deterministic given the stream state.
  virtual ParamVector sample(RngStream& rng) const = 0;
};

// Independent uniform draw on each coordinate's interval.
class UniformBoxPrior final : public Prior {
 public:
  explicit UniformBoxPrior(std::vector<std::pair<double, double>> bounds);

  // One-dimensional convenience.
  UniformBoxPrior(double lo, double hi);

  std::size_t dimension() const override { return bounds_.size(); }
  std::pair<double, double> support(std::size_t dim) const override;
  ParamVector sample(RngStream& rng) const override;

 private:
  std::vector<std::pair<double, double>> bounds_;
};

}  // namespace lfpe
