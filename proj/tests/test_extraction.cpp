#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <doctest.h>

#include <cmath>
#include <random>

#include "movelab/extraction.hpp"
#include "movelab/families.hpp"
#include "test_util.hpp"

using namespace movelab;

namespace {

Rat q(long a, long b) { return Rat(a) / Rat(b); }

}  // namespace

TEST_CASE("extraction at rate zero is the identity") {
  std::mt19937_64 rng(3);
  auto mu = testutil::random_measure_q(3, rng);
  for (auto dir : {ExtractDirection::up, ExtractDirection::down, ExtractDirection::both}) {
    auto nu = extract(mu, dir, Rat(0));
    CHECK(nu.is_nonnegative());
    CHECK(nu.to_measure() == mu);
  }
}

TEST_CASE("product measures extract to shifted levels") {
  GroundSet g(4);
  auto mu = product_measure<Rat>(g, q(1, 2));

  // mu = nu^(+,eps) with nu = pi_{(p-eps)/(1-eps)}.
  auto up = extract_up(mu, q(1, 4));
  CHECK(up.is_nonnegative());
  CHECK(up.to_measure() == product_measure<Rat>(g, q(1, 3)));

  // mu = nu^(-,eps) with nu = pi_{p/(1-eps)}.
  auto down = extract_down(mu, q(1, 4));
  CHECK(down.is_nonnegative());
  CHECK(down.to_measure() == product_measure<Rat>(g, q(2, 3)));
}

TEST_CASE("the fair product is a fixed point of symmetric extraction") {
  GroundSet g(3);
  auto mu = product_measure<Rat>(g, q(1, 2));
  auto both = extract_both(mu, q(1, 4), q(1, 4));
  CHECK(both.to_measure() == mu);
}

TEST_CASE("point mass at zero survives down-extraction") {
  auto mu = point_mass<Rat>(GroundSet(3), 0);
  auto nu = extract_down(mu, q(1, 3));
  CHECK(nu.to_measure() == mu);
}

TEST_CASE("parameter validation") {
  auto mu = product_measure<Rat>(GroundSet(2), q(1, 2));
  CHECK_THROWS_AS((void)extract_up(mu, Rat(1)), Error);
  CHECK_THROWS_AS((void)extract_down(mu, Rat(-1)), Error);
  CHECK_THROWS_AS((void)extract_both(mu, q(1, 2), q(1, 2)), Error);
  CHECK_THROWS_AS((void)extract_both(mu, q(2, 3), q(2, 3)), Error);
}

TEST_CASE("extraction inverts the channel exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(trial % 3);
    auto nu = testutil::random_measure_q(n, rng, 0.3);
    Rat eps = testutil::random_rat(rng);
    Rat delta = testutil::random_rat(rng);

    auto up = extract_up(apply_channel(nu, NoiseChannel<Rat>(Rat(0), eps)), eps);
    CHECK(up.to_measure() == nu);

    auto down = extract_down(apply_channel(nu, NoiseChannel<Rat>(eps, Rat(0))), eps);
    CHECK(down.to_measure() == nu);

    if (eps + delta < 1) {
      auto both = extract_both(apply_channel(nu, NoiseChannel<Rat>(eps, delta)), eps, delta);
      CHECK(both.to_measure() == nu);
    }
  }
}

TEST_CASE("forward application recovers the input measure even from signed output") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    auto mu = testutil::random_measure_q(3, rng, 0.4);
    Rat eps = testutil::random_rat(rng);
    auto nu = extract_up(mu, eps);
    auto back = apply_channel(nu, NoiseChannel<Rat>(Rat(0), eps));
    for (Config c = 0; c < mu.size(); ++c) CHECK(back[c] == mu[c]);
  }
}

TEST_CASE("down-extraction is the complement conjugate of up-extraction") {
  std::mt19937_64 rng(37);
  auto mu = testutil::random_measure_q(4, rng, 0.2);
  Rat eps = q(2, 7);
  auto direct = extract_down(mu, eps);
  auto conj = extract_up(complement(mu), eps);
  for (Config c = 0; c < mu.size(); ++c)
    CHECK(direct[c] == conj[mu.ground().full_mask() & ~c]);
}

TEST_CASE("max up-extraction rate of a product measure is its level") {
  for (long num : {1L, 3L, 7L}) {
    auto mu = product_measure<Rat>(GroundSet(3), q(num, 10));
    Rat e = max_extract_eps(mu, ExtractDirection::up, 1e-9);
    CHECK(std::abs(to_double(e) - static_cast<double>(num) / 10.0) < 1e-8);
  }
}

TEST_CASE("support off an up-set blocks any up-extraction") {
  // Mass at 0 but none at the singletons above it: nu(0) < 0 for every eps > 0.
  auto mu = MeasureQ::from_entries(GroundSet(2), {{0, q(1, 2)}, {3, q(1, 2)}});
  CHECK(max_extract_eps(mu, ExtractDirection::up, 1e-9) == 0);
}

TEST_CASE("max extraction rate refuses float mode") {
  auto mu = product_measure<double>(GroundSet(3), 0.5);
  CHECK_THROWS_AS((void)max_extract_eps(mu, ExtractDirection::up, 1e-9), Error);
}

TEST_CASE("max extraction rate along the parity family") {
  // The binding constraint is nonnegativity at the largest odd level m <= k:
  // 3(1-2e)^m >= 1, so e*(k) = (1 - 3^{-1/m})/2. Consecutive (odd, odd+1)
  // pairs tie exactly; the sequence is positive, weakly decreasing, and
  // strictly decreasing between plateaus.
  double prev = 1.0;
  for (int k = 2; k <= 7; ++k) {
    double e = to_double(max_extract_eps(hajek_block<Rat>(k), ExtractDirection::up, 1e-9));
    int m = (k % 2 == 1) ? k : k - 1;
    double closed = (1.0 - std::pow(3.0, -1.0 / m)) / 2.0;
    CHECK(e > 0);
    CHECK(e <= prev);
    if (k % 2 == 1) CHECK(e < prev);
    CHECK(std::abs(e - closed) < 1e-8);
    prev = e;
  }
}

TEST_CASE("any channel output up-extracts at its up-rate") {
  // A (down, up) channel factors as pure thinning at down/(1-up) followed by
  // pure thickening at up, so extracting at the up-rate must land on a genuine
  // measure: the thinned original.
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 15; ++trial) {
    auto nu = testutil::random_measure_q(3, rng, 0.3);
    Rat d = testutil::random_rat(rng), u = testutil::random_rat(rng);
    if (!(u < 1) || !(d / (1 - u) <= 1)) continue;
    auto moved = apply_channel(nu, NoiseChannel<Rat>(d, u));
    auto pulled = extract_up(moved, u);
    CHECK(pulled.is_nonnegative());
    auto thinned = apply_channel(nu, NoiseChannel<Rat>(Rat(d / (1 - u)), Rat(0)));
    CHECK(pulled.to_measure() == thinned);
  }
}

TEST_CASE("thickening bound algebra") {
  Rat alpha = q(1, 3), eps = q(1, 4);
  Rat d = max_thickening_delta(alpha, eps);
  // At delta = d the composite up-rate equals alpha exactly:
  // up = alpha(1-eps) + (1 - alpha(1-eps)) * d.
  Rat up = alpha * (1 - eps) + (1 - alpha * (1 - eps)) * d;
  CHECK(up == alpha);
  CHECK_THROWS_AS((void)max_thickening_delta(Rat(0), eps), Error);
  CHECK_THROWS_AS((void)max_thickening_delta(alpha, Rat(1)), Error);
}

TEST_CASE("signed vectors stay normalized through channels and extractions") {
  std::mt19937_64 rng(47);
  auto mu = testutil::random_measure_q(4, rng, 0.5);
  for (Rat eps : {q(1, 5), q(2, 5), q(4, 5)}) {
    auto nu = extract_up(mu, eps);
    Rat total = 0;
    for (Config c = 0; c < mu.size(); ++c) total += nu[c];
    CHECK(total == 1);
  }
}
