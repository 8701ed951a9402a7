#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <doctest.h>

#include "lfpe/errors.hpp"
#include "lfpe/photodetector.hpp"
#include "lfpe/rng.hpp"

using lfpe::kClick;
using lfpe::kNoClick;
using lfpe::Outcome;
using lfpe::ParamVector;
using lfpe::PhotodetectorModel;
using lfpe::RngStream;
using lfpe::SingularInformationError;

TEST_CASE("construction validates the noise parameters") {
  CHECK_NOTHROW(PhotodetectorModel(0.0, 0.0));
  CHECK_NOTHROW(PhotodetectorModel(0.9, 0.05));
  CHECK_NOTHROW(PhotodetectorModel(0.9, 0.2));  // inverted response is fine
  CHECK_THROWS_AS(PhotodetectorModel(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PhotodetectorModel(0.0, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(PhotodetectorModel(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(PhotodetectorModel(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PhotodetectorModel(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("click probability at its pinned values") {
  const PhotodetectorModel model(0.9, 0.05);
  CHECK(model.click_probability(0.0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(model.click_probability(1.0) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(model.click_probability(0.5) == doctest::Approx(0.925).epsilon(1e-12));
  CHECK_THROWS_AS(model.click_probability(-0.01), std::domain_error);
  CHECK_THROWS_AS(model.click_probability(1.01), std::domain_error);

  const PhotodetectorModel clean(0.0, 0.0);
  CHECK(clean.click_probability(0.37) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("parameter range inverts the click probability") {
  const PhotodetectorModel model(0.9, 0.05);
  const auto [lo, hi] = model.parameter_range();
  CHECK(lo == doctest::Approx(-18.0).epsilon(1e-9));
  CHECK(hi == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::fabs(model.click_probability_unchecked(lo)) < 1e-9);
  CHECK(model.click_probability_unchecked(hi) == doctest::Approx(1.0).epsilon(1e-9));

  // A noiseless detector identifies p on exactly [0, 1].
  const PhotodetectorModel clean(0.0, 0.0);
  CHECK(clean.parameter_range().first == 0.0);
  CHECK(clean.parameter_range().second == 1.0);

  // Inverted response (negative slope) flips the endpoints, not the order.
  const PhotodetectorModel inverted(0.9, 0.2);
  const auto [ilo, ihi] = inverted.parameter_range();
  CHECK(ilo < ihi);
  CHECK(inverted.click_probability_unchecked(ilo) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(inverted.click_probability_unchecked(ihi)) < 1e-9);
}

TEST_CASE("maximum-likelihood estimate at its pinned values") {
  const PhotodetectorModel model(0.9, 0.05);
  // q-hat = 0.925 inverts to p = 0.5.
  CHECK(model.mle(925, 1000) == doctest::Approx(0.5).epsilon(1e-12));
  // Counts below N*alpha or above N*(1-beta) clamp to the physical range.
  CHECK(model.mle(0, 1000) == 0.0);
  CHECK(model.mle(1000, 1000) == 1.0);

  const PhotodetectorModel clean(0.0, 0.0);
  CHECK(clean.mle(300, 1000) == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(model.mle(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(model.mle(11, 10), std::invalid_argument);
}

TEST_CASE("fisher information at its pinned value") {
  const PhotodetectorModel model(0.9, 0.05);
  // slope^2 N / (q (1-q)) with q = 0.925: 2.5 / 0.069375 = 4000/111.
  CHECK(model.fisher_information(0.5, 1000) == doctest::Approx(4000.0 / 111.0).epsilon(1e-12));
  // Proportional to the number of measurements.
  CHECK(model.fisher_information(0.5, 2000) ==
        doctest::Approx(2.0 * model.fisher_information(0.5, 1000)).epsilon(1e-12));
  CHECK_THROWS_AS(model.fisher_information(0.5, 0), std::invalid_argument);

  // Deterministic outcomes carry no local information.  At this alpha/beta
  // the upper endpoint hits q = 1 exactly; the lower endpoint's q rounds to
  // ~4e-16 instead of 0, so the information there is finite but enormous.
  CHECK_THROWS_AS(model.fisher_information(2.0, 1000), SingularInformationError);
  CHECK(model.fisher_information(-18.0, 1000) > 1e12);
  const PhotodetectorModel clean(0.0, 0.0);
  CHECK_THROWS_AS(clean.fisher_information(0.0, 10), SingularInformationError);
  CHECK_THROWS_AS(clean.fisher_information(1.0, 10), SingularInformationError);
}

TEST_CASE("fisher information matches a finite-difference score computation") {
  // Independent oracle: I(p) = N * E[(d/dp log Pr(d|p))^2], with the score
  // derivative taken numerically instead of via the closed form.
  const double h = 1e-6;
  for (const auto& [alpha, beta, p] : std::vector<std::tuple<double, double, double>>{
           {0.9, 0.05, 0.5}, {0.9, 0.05, -3.0}, {0.0, 0.0, 0.3}, {0.2, 0.1, 0.7}}) {
    const PhotodetectorModel model(alpha, beta);
    const double q = model.click_probability_unchecked(p);
    const auto log_click = [&](double x) {
      return std::log(model.click_probability_unchecked(x));
    };
    const auto log_noclick = [&](double x) {
      return std::log(1.0 - model.click_probability_unchecked(x));
    };
    const double score_click = (log_click(p + h) - log_click(p - h)) / (2.0 * h);
    const double score_noclick = (log_noclick(p + h) - log_noclick(p - h)) / (2.0 * h);
    const double numeric =
        1000.0 * (q * score_click * score_click + (1.0 - q) * score_noclick * score_noclick);
    CHECK(model.fisher_information(p, 1000) == doctest::Approx(numeric).epsilon(1e-6));
  }
}

TEST_CASE("error bound at its pinned value and scaling") {
  const PhotodetectorModel model(0.9, 0.05);
  CHECK(model.asymptotic_mse_bound(1000) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
  CHECK(model.asymptotic_mse_bound(2000) ==
        doctest::Approx(0.5 * model.asymptotic_mse_bound(1000)).epsilon(1e-12));
  const PhotodetectorModel clean(0.0, 0.0);
  CHECK(clean.asymptotic_mse_bound(10000) == doctest::Approx(1.0 / 60000.0).epsilon(1e-12));
  CHECK_THROWS_AS(model.asymptotic_mse_bound(0), std::invalid_argument);
}

TEST_CASE("error bound equals the averaged inverse information within 1%") {
  // The bound integrates 1/I over click fractions spread evenly across the
  // response range; the discrete average over k in {0..N} must land on it.
  const PhotodetectorModel model(0.9, 0.05);
  const std::uint64_t trials = 1000;
  const double s = model.slope();
  double sum = 0.0;
  for (std::uint64_t k = 0; k <= trials; ++k) {
    // Unclamped estimate inverting q-hat = k/N; endpoints contribute zero
    // because the information diverges there.
    const double p_hat =
        (static_cast<double>(k) / trials - model.alpha()) / s;
    if (k == 0 || k == trials) continue;
    sum += 1.0 / model.fisher_information(p_hat, trials);
  }
  const double average = sum / static_cast<double>(trials + 1);
  CHECK(average == doctest::Approx(model.asymptotic_mse_bound(trials)).epsilon(0.01));
}

TEST_CASE("strong adapter evaluates both outcomes coherently") {
  const PhotodetectorModel model(0.9, 0.05);
  const lfpe::PhotodetectorStrong strong = lfpe::strong_interface(model);
  CHECK(strong.outcome_count() == 2);
  CHECK(strong.likelihood(kClick, ParamVector{0.5}) == doctest::Approx(0.925).epsilon(1e-12));
  CHECK(strong.likelihood(kNoClick, ParamVector{0.5}) == doctest::Approx(0.075).epsilon(1e-12));

  RngStream rng(55);
  for (int i = 0; i < 100; ++i) {
    const auto [lo, hi] = model.parameter_range();
    const double p = lo + (hi - lo) * rng.next_double();
    const double total =
        strong.likelihood(kClick, ParamVector{p}) + strong.likelihood(kNoClick, ParamVector{p});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Out-of-range parameters saturate instead of leaving [0, 1].
  CHECK(strong.likelihood(kClick, ParamVector{-30.0}) == 0.0);
  CHECK(strong.likelihood(kNoClick, ParamVector{-30.0}) == 1.0);

  CHECK_THROWS_AS(strong.likelihood(Outcome{2}, ParamVector{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(strong.likelihood(kClick, ParamVector{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("weak adapter clicks at the modelled frequency") {
  const PhotodetectorModel model(0.2, 0.1);
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model);
  CHECK(weak.outcome_count() == 2);

  const double p = 0.3;
  const double q = model.click_probability(p);  // 0.2 + 0.7 * 0.3 = 0.41
  RngStream rng(66);
  const int draws = 200000;
  int clicks = 0;
  for (int i = 0; i < draws; ++i) {
    const Outcome outcome = weak.sample(ParamVector{p}, rng);
    REQUIRE((outcome == kClick || outcome == kNoClick));
    clicks += outcome == kClick ? 1 : 0;
  }
  const double tolerance = 3.0 * std::sqrt(q * (1.0 - q) / draws);
  CHECK(std::fabs(static_cast<double>(clicks) / draws - q) < tolerance);
}

TEST_CASE("weak and strong adapters describe the same distribution") {
  const PhotodetectorModel model(0.9, 0.05);
  const lfpe::PhotodetectorStrong strong = lfpe::strong_interface(model);
  const lfpe::PhotodetectorWeak weak = lfpe::weak_interface(model);
  RngStream rng(67);
  for (double p : {-10.0, -2.0, 0.0, 0.5, 1.0, 1.8}) {
    const int draws = 50000;
    int clicks = 0;
    RngStream stream = rng.derive(static_cast<std::uint64_t>((p + 20.0) * 100));
    for (int i = 0; i < draws; ++i) {
      clicks += weak.sample(ParamVector{p}, stream) == kClick ? 1 : 0;
    }
    const double q = strong.likelihood(kClick, ParamVector{p});
    const double sd = std::sqrt(std::max(q * (1.0 - q), 1e-12) / draws);
    CHECK(std::fabs(static_cast<double>(clicks) / draws - q) < 4.0 * sd + 1e-4);
  }
}

TEST_CASE("uniform parameter prior covers exactly the invertible range") {
  const PhotodetectorModel model(0.9, 0.05);
  const lfpe::UniformBoxPrior prior = lfpe::uniform_parameter_prior(model);
  CHECK(prior.dimension() == 1);
  CHECK(prior.support(0) == model.parameter_range());
}
