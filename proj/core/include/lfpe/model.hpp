#pragma once

#include <cstddef>
#include <cstdint>

#include "lfpe/particle.hpp"
#include "lfpe/rng.hpp"

namespace lfpe {

// Index into a model's finite outcome alphabet.
struct Outcome {
  std::uint32_t label = 0;

  friend bool operator==(Outcome, Outcome) = default;
};

// Simulator that evaluates outcome probabilities exactly.
class StrongModel {
 public:
  virtual ~StrongModel() = default;

  virtual std::size_t outcome_count() const = 0;

  // Pr(outcome | params), in [0, 1]; sums to one over the outcome alphabet.
  virtual double likelihood(Outcome outcome, const ParamVector& params) const = 0;
};

// Simulator that can only draw outcomes, never evaluate their probability.
class WeakModel {
 public:
  virtual ~WeakModel() = default;

  virtual std::size_t outcome_count() const = 0;

  // One outcome drawn from Pr(. | params); deterministic given the stream state.
  virtual Outcome sample(const ParamVector& params, RngStream& rng) const = 0;
};

}  // namespace lfpe
