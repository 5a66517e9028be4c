#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <doctest.h>

#include <cmath>
#include <random>

#include "movelab/domination.hpp"
#include "movelab/families.hpp"
#include "movelab/tolerance.hpp"
#include "test_util.hpp"

using namespace movelab;

namespace {

Rat q(long a, long b) { return Rat(a) / Rat(b); }

template <class T>
T even_count_mass(const BasicMeasure<T>& mu) {
  T acc = scalar_traits<T>::zero();
  for (Config c = 0; c < mu.size(); ++c)
    if (popcount(c) % 2 == 0) acc += mu[c];
  return acc;
}

}  // namespace

TEST_CASE("parity block entries and statistics") {
  auto mu = hajek_block<Rat>(2);
  CHECK(mu[0] == q(1, 3));
  CHECK(mu[1] == q(1, 6));
  CHECK(mu[2] == q(1, 6));
  CHECK(mu[3] == q(1, 3));

  for (int k = 2; k <= 10; ++k) {
    auto b = hajek_block<Rat>(k);
    CHECK(even_count_mass(b) == q(2, 3));
    // Single-site marginal stays fair.
    Rat on = 0;
    for (Config c = 0; c < b.size(); ++c)
      if (c & 1) on += b[c];
    CHECK(on == q(1, 2));
  }
  CHECK_THROWS_AS((void)hajek_block<Rat>(1), Error);
}

TEST_CASE("parity survival probability after thickening") {
  CHECK(parity_after_noise<Rat>(8, q(1, 4), 0) == 1);
  CHECK(parity_after_noise<Rat>(8, q(1, 2), 5) == q(1, 2));
  CHECK(parity_after_noise<Rat>(8, q(1, 4), 3) == q(9, 16));
  CHECK_THROWS_AS((void)parity_after_noise<Rat>(4, q(1, 4), 5), Error);
  CHECK_THROWS_AS((void)parity_after_noise<Rat>(4, q(3, 4), 2), Error);

  // Exhaustive check: flipping each of l zeros up independently with rate eps,
  // the chance an even number flip.
  for (int l = 0; l <= 12; ++l) {
    for (Rat eps : {q(1, 10), q(1, 3), q(1, 2)}) {
      Rat direct = 0;
      for (std::uint32_t s = 0; s < (1u << l); ++s) {
        int flips = popcount(s);
        if (flips % 2 != 0) continue;
        Rat w = 1;
        for (int i = 0; i < l; ++i) w *= (s >> i & 1u) ? eps : 1 - eps;
        direct += w;
      }
      CHECK(direct == parity_after_noise<Rat>(12, eps, l));
    }
  }
}

TEST_CASE("block measure entries and count law") {
  auto mu = nonrigid_block<Rat>(2);
  CHECK(mu[0] == 0);
  CHECK(mu[1] == q(1, 8));
  CHECK(mu[2] == q(1, 8));
  CHECK(mu[3] == q(3, 4));

  for (int k = 2; k <= 10; ++k) {
    auto counts = count_distribution(nonrigid_block<Rat>(k));
    auto direct = nonrigid_block_counts<Rat>(k);
    for (int j = 0; j <= k; ++j) CHECK(counts[j] == direct[j]);
  }
  // Count construction works far past the 2^k measure cap.
  auto big = nonrigid_block_counts<Rat>(200);
  CHECK(big[1] == rat_pow(q(1, 2), 200));
  CHECK(big[200] == 1 - rat_pow(q(1, 2), 200));

  CHECK_THROWS_AS((void)nonrigid_block<Rat>(1), Error);
  CHECK_THROWS_AS((void)nonrigid_block<Rat>(3, Rat(1)), Error);
}

TEST_CASE("the fair product sits below every block") {
  for (int k = 2; k <= 12; ++k)
    CHECK(dominates_symmetric(binomial_counts<Rat>(k, q(1, 2)), nonrigid_block_counts<Rat>(k)));
  // ... but pi_{1/2 + delta} eventually does not: the small-set ratio dips
  // while the linear term dominates, then grows geometrically past every bound.
  CHECK(block_small_set_ratio<Rat>(6, q(1, 10)) == q(3125, 8192));
  Rat prev = block_small_set_ratio<Rat>(4, q(1, 10));
  for (int k = 5; k <= 40; ++k) {
    Rat r = block_small_set_ratio<Rat>(k, q(1, 10));
    CHECK(r > prev);
    prev = r;
  }
  CHECK(prev > 100);
}

TEST_CASE("thinned block ratios approach their limits") {
  // P(thinned ≡ 0) relative to the fair product: eps + (2^k - 1) eps^k.
  CHECK(noised_allzero_ratio<Rat>(3, q(1, 4)) == q(1, 4) + 7 * rat_pow(q(1, 4), 3));
  CHECK(std::abs(to_double(noised_allzero_ratio<Rat>(40, q(1, 4))) - 0.25) < 1e-9);

  // P(thinned has ≤ 1 one) relative: falls like 1/(k+1).
  double third = to_double(noised_small_count_ratio<Rat>(40, q(1, 4)));
  CHECK(std::abs(third - 1.0 / 41.0) < 1e-9);
  double prev = 1;
  for (int k = 2; k <= 20; ++k) {
    double r = to_double(noised_small_count_ratio<Rat>(k, q(1, 4)));
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("noised block counts match direct enumeration") {
  for (int k = 2; k <= 6; ++k) {
    for (Rat eps : {q(1, 4), q(1, 2)}) {
      auto direct = count_distribution(
          apply_channel(nonrigid_block<Rat>(k), NoiseChannel<Rat>(eps, Rat(0))));
      auto fast = noised_block_counts<Rat>(k, q(1, 2), eps);
      for (int j = 0; j <= k; ++j) CHECK(direct[j] == fast[j]);
    }
  }
}

TEST_CASE("block p_max via counts matches the flow and the oracle") {
  for (int k = 2; k <= 6; ++k) {
    auto mu = nonrigid_block<Rat>(k);
    double flow = to_double(p_max(mu, 1e-9));
    double sym = to_double(p_max_exchangeable(count_distribution(mu), 1e-9));
    double oracle = to_double(p_max_oracle(mu));
    CHECK(std::abs(flow - sym) < 1e-6);
    CHECK(std::abs(flow - oracle) < 1e-6);
  }
  CHECK(std::abs(to_double(p_max_exchangeable(nonrigid_block_counts<Rat>(2), 1e-9)) -
                 std::sqrt(3.0) / 2.0) < 1e-8);
}

TEST_CASE("block p_max decreases toward one half") {
  double prev = 1.0;
  for (int k = 2; k <= 12; ++k) {
    double p = to_double(p_max_exchangeable(nonrigid_block_counts<Rat>(k), 1e-10));
    CHECK(p >= 0.5);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("thinning the block preserves fair-product domination for large k") {
  auto ok = [&](int k, const Rat& eps) {
    return dominates_symmetric(binomial_counts<Rat>(k, q(1, 2)),
                               noised_block_counts<Rat>(k, q(1, 2), eps));
  };
  // Mild thinning never breaks it: the crossover sits at the smallest k.
  for (int k = 2; k <= 40; ++k) CHECK(ok(k, q(1, 4)));

  // Aggressive thinning breaks small blocks (the all-zeros mass more than
  // doubles) but large blocks recover.
  Rat hard = q(9, 20);
  CHECK_FALSE(ok(2, hard));
  int k0 = -1;
  for (int k = 2; k <= 60 && k0 < 0; ++k)
    if (ok(k, hard)) k0 = k;
  REQUIRE(k0 > 2);
  for (int k = k0; k <= 80; ++k) CHECK(ok(k, hard));
}

TEST_CASE("conditioned binomial laws") {
  auto plain = conditioned_binomial<Rat>(5, q(3, 10), 0);
  auto bin = binomial_counts<Rat>(5, q(3, 10));
  for (int j = 0; j <= 5; ++j) CHECK(plain[j] == bin[j]);

  auto c = conditioned_binomial<Rat>(2, q(1, 2), 1);
  CHECK(c[0] == 0);
  CHECK(c[1] == q(2, 3));
  CHECK(c[2] == q(1, 3));

  auto top = conditioned_binomial<Rat>(4, q(1, 5), 4);
  CHECK(top[4] == 1);

  CHECK_THROWS_AS((void)conditioned_binomial<Rat>(4, Rat(0), 1), Error);
  CHECK_THROWS_AS((void)conditioned_binomial<Rat>(4, q(1, 2), 5), Error);
}

TEST_CASE("conditioned binomials are monotone in level and threshold") {
  for (int k = 2; k <= 8; ++k)
    for (int m = 0; m <= k; ++m) {
      for (long i = 1; i < 9; ++i)
        CHECK(dominates_symmetric(conditioned_binomial<Rat>(k, q(i, 10), m),
                                  conditioned_binomial<Rat>(k, q(i + 1, 10), m)));
      if (m < k)
        CHECK(dominates_symmetric(conditioned_binomial<Rat>(k, q(1, 2), m),
                                  conditioned_binomial<Rat>(k, q(1, 2), m + 1)));
    }
}

TEST_CASE("mixture pair: movability radius and rigidity ceiling") {
  auto [nu, mu] = mixture_example<Rat>(q(1, 2), q(1, 4), 4);
  CHECK(dominates(nu, mu).dominated);
  CHECK(std::abs(to_double(sup_eps_down(nu, mu, 1e-9)) - 0.5) < 1e-6);

  for (int n = 2; n <= 6; ++n) {
    auto [nu2, mu2] = mixture_example<Rat>(q(1, 2), q(1, 4), n);
    double bound = 1.0 - std::pow(2.0, -1.0 / n);
    CHECK(to_double(p_max(mu2, 1e-9)) <= bound + 1e-9);
  }
  CHECK_THROWS_AS((void)mixture_example<Rat>(q(1, 4), q(1, 2), 3), Error);
}

TEST_CASE("paired windows: structure and movability") {
  auto [even, odd, mixed] = paired_doubling<Rat>(4);
  // Locked pairs: only four configurations carry mass under the even pairing.
  CHECK(even[0b0000] == q(1, 4));
  CHECK(even[0b0011] == q(1, 4));
  CHECK(even[0b1100] == q(1, 4));
  CHECK(even[0b1111] == q(1, 4));
  CHECK(odd[0b0110] == q(1, 8));  // middle pair locked, fair bits at the ends
  CHECK(mixed[0b0000] == q(1, 4) / 2 + q(1, 16) / 2 + q(1, 16) / 2);

  // All three are rigid on the window.
  CHECK(even[0b1111] > 0);
  CHECK(odd[0b1111] > 0);
  CHECK(mixed[0b1111] > 0);

  // For eps = 0.1 some positive delta keeps the noised even measure below the
  // original.
  Rat eps = q(1, 10);
  Rat found = 0;
  for (int j = 4; j <= 12; ++j) {
    Rat delta = rat_pow(q(1, 2), j);
    auto moved = apply_channel(apply_channel(even, NoiseChannel<Rat>(eps, Rat(0))),
                               NoiseChannel<Rat>(Rat(0), delta));
    if (dominates(moved, even).dominated) {
      found = delta;
      break;
    }
  }
  CHECK(found > 0);
  CHECK_THROWS_AS((void)paired_doubling<Rat>(5), Error);
  CHECK_THROWS_AS((void)paired_doubling<Rat>(2), Error);
}

TEST_CASE("block products multiply structure") {
  auto two = block_product<Rat>({2, 3}, BlockKind::nonrigid);
  CHECK(two.sites() == 5);
  // p_max of a product is the minimum over the factors.
  double p2 = to_double(p_max(nonrigid_block<Rat>(2), 1e-9));
  double p3 = to_double(p_max(nonrigid_block<Rat>(3), 1e-9));
  double pp = to_double(p_max(two, 1e-9));
  CHECK(std::abs(pp - std::min(p2, p3)) < 1e-6);

  auto parity2 = block_product<Rat>({2, 2}, BlockKind::hajek);
  CHECK(insertion_tolerance(parity2).insertion == q(1, 3));
  // All-ones mass multiplies: (1/3)^2.
  CHECK(parity2[parity2.ground().full_mask()] == q(1, 9));

  CHECK_THROWS_AS((void)block_product<Rat>({}, BlockKind::hajek), Error);
}

TEST_CASE("exchangeable p_max agrees with the flow on exchangeable inputs") {
  std::mt19937_64 rng(51);
  GroundSet g(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = product_measure<Rat>(g, testutil::random_rat(rng));
    auto b = product_measure<Rat>(g, testutil::random_rat(rng));
    auto mu = mixture(std::vector<Rat>{q(1, 4), q(3, 4)}, std::vector<MeasureQ>{a, b});
    double full = to_double(p_max(mu, 1e-9));
    double sym = to_double(p_max_exchangeable(count_distribution(mu), 1e-9));
    CHECK(std::abs(full - sym) < 1e-6);
  }
}
