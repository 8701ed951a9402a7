#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "lfpe/rng.hpp"

using lfpe::RngStream;

TEST_CASE("equal seed and stream ids reproduce the draw sequence") {
  RngStream a(1234, 7);
  RngStream b(1234, 7);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 64; ++i) CHECK(a.next_double() == b.next_double());
}

TEST_CASE("different seeds or stream ids give different sequences") {
  RngStream base(1234, 0);
  RngStream other_seed(1235, 0);
  RngStream other_stream(1234, 1);
  CHECK(base.key() != other_seed.key());
  CHECK(base.key() != other_stream.key());
  // A shared prefix of any length would be an astronomical coincidence.
  bool seed_differs = false;
  bool stream_differs = false;
  RngStream b1(1234, 0);
  RngStream b2(1234, 0);
  for (int i = 0; i < 8; ++i) {
    seed_differs |= b1.next_u64() != other_seed.next_u64();
    stream_differs |= b2.next_u64() != other_stream.next_u64();
  }
  CHECK(seed_differs);
  CHECK(stream_differs);
}

TEST_CASE("derive is keyed by identity, not by consumed state") {
  RngStream parent(99, 3);
  RngStream sibling(99, 3);
  for (int i = 0; i < 1000; ++i) sibling.next_u64();  // burn state on one copy

  RngStream child_fresh = parent.derive(5);
  RngStream child_burned = sibling.derive(5);
  CHECK(child_fresh.key() == child_burned.key());
  for (int i = 0; i < 32; ++i) CHECK(child_fresh.next_u64() == child_burned.next_u64());
}

TEST_CASE("derived children differ from the parent and from each other") {
  RngStream parent(5, 0);
  RngStream c0 = parent.derive(0);
  RngStream c1 = parent.derive(1);
  CHECK(c0.key() != c1.key());
  CHECK(c0.key() != parent.key());
  // Grandchildren on different branches must not collide either.
  CHECK(parent.derive(0).derive(1).key() != parent.derive(1).derive(0).key());
}

TEST_CASE("next_double is uniform on [0, 1)") {
  RngStream rng(2024);
  const int n = 100000;
  double sum = 0.0;
  double min_seen = 1.0;
  double max_seen = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    min_seen = std::min(min_seen, u);
    max_seen = std::max(max_seen, u);
  }
  // Mean of U[0,1): sd of the average is 1/sqrt(12 n) ~ 9.1e-4.
  CHECK(std::fabs(sum / n - 0.5) < 3.5 * 9.2e-4);
  CHECK(min_seen < 0.001);
  CHECK(max_seen > 0.999);
}

TEST_CASE("next_normal has standard moments") {
  RngStream rng(77, 1);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    REQUIRE(std::isfinite(z));
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 3.5 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 3.5 * std::sqrt(2.0 / n));
}

TEST_CASE("sibling substreams look independent") {
  RngStream parent(31, 4);
  RngStream a = parent.derive(10);
  RngStream b = parent.derive(11);
  const int n = 10000;
  double sum_ab = 0.0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_a2 = 0.0;
  double sum_b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next_double();
    const double y = b.next_double();
    sum_a += x;
    sum_b += y;
    sum_a2 += x * x;
    sum_b2 += y * y;
    sum_ab += x * y;
  }
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double var_a = sum_a2 / n - (sum_a / n) * (sum_a / n);
  const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
  const double corr = cov / std::sqrt(var_a * var_b);
  CHECK(std::fabs(corr) < 3.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("draw sequences are pinned across platforms and rebuilds") {
  // Regression pin: these values define the deterministic contract that every
  // recorded experiment seed relies on.
  RngStream rng(42);
  const std::vector<std::uint64_t> expected = {
      15460777765899015900ull,
      8243245343686179085ull,
      16371353235289056875ull,
      10127871714880040305ull,
  };
  for (std::uint64_t want : expected) CHECK(rng.next_u64() == want);

  RngStream again(42);
  CHECK(again.next_double() == 0.83813044210516474);
  CHECK(again.next_double() == 0.44686722549777869);
}
