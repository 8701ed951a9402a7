#pragma once

#include <cstdint>
#include <utility>

#include "lfpe/model.hpp"
#include "lfpe/prior.hpp"

namespace lfpe {

inline constexpr Outcome kNoClick{0};
inline constexpr Outcome kClick{1};

// Photon source of efficiency p read through a noisy binary detector: dark
// counts fire with probability alpha when no photon arrives, and an arriving
// photon is missed with probability beta.  The click probability
//
//   q(p) = p (1 - beta) + (1 - p) alpha = alpha + (1 - alpha - beta) p
//
// is affine in p with slope 1 - alpha - beta, so alpha + beta = 1 makes p
// unidentifiable and is rejected at construction.
class PhotodetectorModel {
 public:
  PhotodetectorModel(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // dq/dp, never zero.
  double slope() const { return 1.0 - alpha_ - beta_; }

  // Pr(click | p) for a physical source efficiency p in [0, 1].
  double click_probability(double p) const;

  // q(p) without the domain check, for any p with q(p) in [0, 1].
  double click_probability_unchecked(double p) const { return alpha_ + slope() * p; }

  // Interval of p values whose click probability lands in [0, 1] — the widest
  // range over which the model can be inverted.  Equals [0, 1] for a
  // noiseless detector and widens as |slope| shrinks.
  std::pair<double, double> parameter_range() const;

  // Maximum-likelihood estimate of p from `clicks` clicks in `trials`
  // measurements, clamped to [0, 1].
  double mle(std::uint64_t clicks, std::uint64_t trials) const;

  // Fisher information about p carried by `trials` measurements.  Undefined
  // (SingularInformationError) where q(p) is 0 or 1.
  double fisher_information(double p, std::uint64_t trials) const;

  // Large-sample lower bound on the mean squared error of estimating p from
  // `trials` measurements: the Fisher bound 1/I(p) averaged over click counts
  // spread uniformly across {0..trials}.
  double asymptotic_mse_bound(std::uint64_t trials) const;

 private:
  double alpha_;
  double beta_;
};

// Exact-likelihood adapter: evaluates q(p) and 1 - q(p).
class PhotodetectorStrong final : public StrongModel {
 public:
  explicit PhotodetectorStrong(PhotodetectorModel model) : model_(model) {}

  std::size_t outcome_count() const override { return 2; }
  double likelihood(Outcome outcome, const ParamVector& params) const override;

 private:
  PhotodetectorModel model_;
};

// Sample-only adapter: draws click / no-click, never exposes q(p).
class PhotodetectorWeak final : public WeakModel {
 public:
  explicit PhotodetectorWeak(PhotodetectorModel model) : model_(model) {}

  std::size_t outcome_count() const override { return 2; }
  Outcome sample(const ParamVector& params, RngStream& rng) const override;

 private:
  PhotodetectorModel model_;
};

PhotodetectorStrong strong_interface(const PhotodetectorModel& model);
PhotodetectorWeak weak_interface(const PhotodetectorModel& model);

// Uniform prior over the model's full invertible parameter range.
UniformBoxPrior uniform_parameter_prior(const PhotodetectorModel& model);

}  // namespace lfpe
