#include "lfpe/photodetector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfpe/errors.hpp"

namespace lfpe {

PhotodetectorModel::PhotodetectorModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("PhotodetectorModel: alpha and beta must lie in [0, 1]");
  }
  if (alpha + beta == 1.0) {
    throw std::invalid_argument(
        "PhotodetectorModel: alpha + beta = 1 makes the click probability independent of p");
  }
}

double PhotodetectorModel::click_probability(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("click_probability: p must lie in [0, 1]");
  }
  return click_probability_unchecked(p);
}

std::pair<double, double> PhotodetectorModel::parameter_range() const {
  const double s = slope();
  const double at_zero = (0.0 - alpha_) / s;
  const double at_one = (1.0 - alpha_) / s;
  return {std::min(at_zero, at_one), std::max(at_zero, at_one)};
}

double PhotodetectorModel::mle(std::uint64_t clicks, std::uint64_t trials) const {
  if (trials == 0) throw std::invalid_argument("mle: at least one measurement required");
  if (clicks > trials) throw std::invalid_argument("mle: clicks cannot exceed measurements");
  const double n = static_cast<double>(trials);
  const double raw = (static_cast<double>(clicks) - n * alpha_) / (n * slope());
  return std::clamp(raw, 0.0, 1.0);
}

double PhotodetectorModel::fisher_information(double p, std::uint64_t trials) const {
  if (trials == 0) {
    throw std::invalid_argument("fisher_information: at least one measurement required");
  }
  const double q = click_probability_unchecked(p);
  if (!(q > 0.0 && q < 1.0)) {
    throw SingularInformationError(
        "fisher_information: click probability 0 or 1 carries no local information");
  }
  const double s = slope();
  return s * s * static_cast<double>(trials) / (q * (1.0 - q));
}

double PhotodetectorModel::asymptotic_mse_bound(std::uint64_t trials) const {
  if (trials == 0) {
    throw std::invalid_argument("asymptotic_mse_bound: at least one measurement required");
  }
  const double s = slope();
  return 1.0 / (6.0 * s * s * static_cast<double>(trials));
}

namespace {

double clamped_click_probability(const PhotodetectorModel& model, const ParamVector& params) {
  if (params.dimension() != 1) {
    throw std::invalid_argument("photodetector: parameter vector must be one-dimensional");
  }
  return std::clamp(model.click_probability_unchecked(params[0]), 0.0, 1.0);
}

}  // namespace

double PhotodetectorStrong::likelihood(Outcome outcome, const ParamVector& params) const {
  if (outcome.label > 1) {
    throw std::invalid_argument("photodetector: outcome label must be 0 (no click) or 1 (click)");
  }
  const double q = clamped_click_probability(model_, params);
  return outcome == kClick ? q : 1.0 - q;
}

Outcome PhotodetectorWeak::sample(const ParamVector& params, RngStream& rng) const {
  const double q = clamped_click_probability(model_, params);
  return rng.next_double() < q ? kClick : kNoClick;
}

PhotodetectorStrong strong_interface(const PhotodetectorModel& model) {
  return PhotodetectorStrong(model);
}

PhotodetectorWeak weak_interface(const PhotodetectorModel& model) {
  return PhotodetectorWeak(model);
}

UniformBoxPrior uniform_parameter_prior(const PhotodetectorModel& model) {
  const auto [lo, hi] = model.parameter_range();
  return UniformBoxPrior(lo, hi);
}

}  // namespace lfpe
