#include "lfpe/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace lfpe {

UniformBoxPrior::UniformBoxPrior(std::vector<std::pair<double, double>> bounds)
    : bounds_(std::move(bounds)) {
  if (bounds_.empty()) {
    throw std::invalid_argument("UniformBoxPrior: at least one dimension required");
  }
  for (const auto& [lo, hi] : bounds_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
      throw std::invalid_argument("UniformBoxPrior: bounds must be finite with lo <= hi");
    }
  }
}

UniformBoxPrior::UniformBoxPrior(double lo, double hi)
    : UniformBoxPrior(std::vector<std::pair<double, double>>{{lo, hi}}) {}

std::pair<double, double> UniformBoxPrior::support(std::size_t dim) const {
  if (dim >= bounds_.size()) throw std::out_of_range("UniformBoxPrior: dimension out of range");
  return bounds_[dim];
}

ParamVector UniformBoxPrior::sample(RngStream& rng) const {
  ParamVector x;
  x.values.reserve(bounds_.size());
  for (const auto& [lo, hi] : bounds_) {
    x.values.push_back(lo + (hi - lo) * rng.next_double());
  }
  return x;
}

}  // namespace lfpe
