#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "movelab/domination.hpp"
#include "movelab/measure.hpp"

namespace movelab {

// Parity-weighted uniform measure on {0,1}^k: configurations with an even
// number of ones carry (4/3)2^-k, odd ones (2/3)2^-k. Every single-site
// conditional probability of a 1 is 1/3 or 2/3, so the family is exactly
// 1/3-insertion (and deletion) tolerant.
template <class T>
BasicMeasure<T> hajek_block(int k) {
  if (k < 2) fail(ErrKind::ParameterOutOfRange, "parity block needs k >= 2");
  GroundSet g(k);
  T even = T(4) / (T(3) * T(std::int64_t{1} << k));
  T odd = T(2) / (T(3) * T(std::int64_t{1} << k));
  std::vector<T> probs(g.space_size());
  for (Config c = 0; c < probs.size(); ++c) probs[c] = popcount(c) % 2 == 0 ? even : odd;
  return BasicMeasure<T>(std::move(g), std::move(probs));
}

// Probability that l independent eps-flips leave a parity unchanged:
// 1/2 + 1/2 (1-2 eps)^l.
template <class T>
T parity_after_noise(int k, const T& eps, int l) {
  if (l < 0 || l > k) fail(ErrKind::ParameterOutOfRange, "need 0 <= l <= k");
  if (eps < 0 || eps > T(1) / 2)
    fail(ErrKind::ParameterOutOfRange, "parity bound needs 0 <= eps <= 1/2");
  T term = scalar_traits<T>::one();
  for (int i = 0; i < l; ++i) term *= 1 - 2 * eps;
  return (1 + term) / 2;
}

// Block measure: mass base^k split evenly over the k single-one
// configurations, the rest on all-ones, nothing anywhere else.
template <class T>
BasicMeasure<T> nonrigid_block(int k, const T& base = T(1) / 2) {
  if (k < 2) fail(ErrKind::ParameterOutOfRange, "block needs k >= 2");
  if (!(base > 0) || !(base < 1)) fail(ErrKind::ParameterOutOfRange, "base must lie in (0,1)");
  GroundSet g(k);
  T basek = scalar_traits<T>::one();
  for (int i = 0; i < k; ++i) basek *= base;
  std::vector<T> probs(g.space_size(), scalar_traits<T>::zero());
  for (int i = 0; i < k; ++i) probs[Config{1} << i] = basek / k;
  probs[g.full_mask()] = 1 - basek;
  return BasicMeasure<T>(std::move(g), std::move(probs));
}

// Count law of nonrigid_block(k, base) built directly — usable far beyond the
// 2^k measure cap (the block is exchangeable, so counts carry everything).
template <class T>
CountDistribution<T> nonrigid_block_counts(int k, const T& base = T(1) / 2) {
  if (k < 2) fail(ErrKind::ParameterOutOfRange, "block needs k >= 2");
  if (!(base > 0) || !(base < 1)) fail(ErrKind::ParameterOutOfRange, "base must lie in (0,1)");
  T basek = scalar_traits<T>::one();
  for (int i = 0; i < k; ++i) basek *= base;
  std::vector<T> probs(static_cast<std::size_t>(k) + 1, scalar_traits<T>::zero());
  probs[1] = basek;
  probs[static_cast<std::size_t>(k)] = 1 - basek;
  return CountDistribution<T>(k, std::move(probs));
}

// Binomial(k, p) conditioned on being at least m.
template <class T>
CountDistribution<T> conditioned_binomial(int k, const T& p, int m) {
  if (!(p > 0) || !(p < 1)) fail(ErrKind::ParameterOutOfRange, "need 0 < p < 1");
  if (m < 0 || m > k) fail(ErrKind::ParameterOutOfRange, "need 0 <= m <= k");
  CountDistribution<T> bin = binomial_counts(k, p);
  T tail = bin.tail(m);
  std::vector<T> probs(static_cast<std::size_t>(k) + 1, scalar_traits<T>::zero());
  for (int j = m; j <= k; ++j) probs[static_cast<std::size_t>(j)] = bin[j] / tail;
  return CountDistribution<T>(k, std::move(probs));
}

// The dominated pair (nu, mu) = (½ pi_q + ½ delta_0, ½ pi_p + ½ delta_0):
// thinning mu by eps keeps nu ⪯ mu^(-,eps) exactly while p(1-eps) ≥ q.
template <class T>
std::pair<BasicMeasure<T>, BasicMeasure<T>> mixture_example(const T& p, const T& q, int n) {
  if (!(q > 0) || !(q < p) || !(p < 1))
    fail(ErrKind::ParameterOutOfRange, "need 0 < q < p < 1");
  GroundSet g(n);
  T half = T(1) / 2;
  std::vector<T> weights{half, half};
  auto delta0 = point_mass<T>(g, 0);
  BasicMeasure<T> nu = mixture<T>(weights, {product_measure<T>(g, q), delta0});
  BasicMeasure<T> mu = mixture<T>(weights, {product_measure<T>(g, p), delta0});
  return {std::move(nu), std::move(mu)};
}

// Measures on an even window where adjacent sites move in locked pairs,
// each pair all-ones or all-zeros with probability ½. mu_e pairs (0,1),(2,3),…;
// mu_o is the shifted pairing (1,2),(3,4),… with the two unpaired boundary
// sites made independent fair bits; mu is their even mixture.
template <class T>
std::tuple<BasicMeasure<T>, BasicMeasure<T>, BasicMeasure<T>> paired_doubling(int n) {
  if (n < 4 || n % 2 != 0)
    fail(ErrKind::ParameterOutOfRange, "paired window needs even n >= 4");
  GroundSet pair_ground(2);
  T half = T(1) / 2;
  BasicMeasure<T> pair_locked =
      BasicMeasure<T>(pair_ground, {half, scalar_traits<T>::zero(), scalar_traits<T>::zero(), half});
  BasicMeasure<T> fair_bit = BasicMeasure<T>(GroundSet(1), {half, half});

  BasicMeasure<T> even = pair_locked;
  for (int placed = 2; placed < n; placed += 2) even = tensor_product(even, pair_locked);

  BasicMeasure<T> odd = fair_bit;
  for (int placed = 1; placed + 2 <= n - 1; placed += 2) odd = tensor_product(odd, pair_locked);
  odd = tensor_product(odd, fair_bit);

  std::vector<T> weights{half, half};
  BasicMeasure<T> mixed = mixture<T>(weights, {even, odd});
  return {std::move(even), std::move(odd), std::move(mixed)};
}

enum class BlockKind { hajek, nonrigid };

// Independent product of block factors on the disjoint union of their sites.
template <class T>
BasicMeasure<T> block_product(const std::vector<int>& ks, BlockKind kind,
                              const T& base = T(1) / 2) {
  if (ks.empty()) fail(ErrKind::ParameterOutOfRange, "need at least one block");
  int total = 0;
  for (int k : ks) total += k;
  if (total > site_cap<T>()) fail(ErrKind::SizeExceeded, "blocks exceed the site cap");
  auto make = [&](int k) {
    return kind == BlockKind::hajek ? hajek_block<T>(k) : nonrigid_block<T>(k, base);
  };
  BasicMeasure<T> out = make(ks.front());
  for (std::size_t i = 1; i < ks.size(); ++i) out = tensor_product(out, make(ks[i]));
  return out;
}

// p_max for exchangeable measures via count-law bisection: feasibility of p is
// tail domination of Binomial(n, p) by the count law. Valid only when the
// underlying measure is symmetric under site permutations (caller attests).
template <class T>
T p_max_exchangeable(const CountDistribution<T>& counts, double tol = 1e-9) {
  auto feasible = [&](const T& p) {
    return dominates_symmetric(binomial_counts(counts.n(), p), counts);
  };
  return detail::sup_bisect<T>(feasible, scalar_traits<T>::one(), tol);
}

// Count law of the eps-thinned block: base^k puts a Bernoulli(1-eps) single
// survivor, the all-ones mass thins to Binomial(k, 1-eps).
template <class T>
CountDistribution<T> noised_block_counts(int k, const T& base, const T& eps) {
  return push_counts_through_channel(nonrigid_block_counts(k, base), NoiseChannel<T>(eps, T(0)));
}

// --- closed-form block ratio sequences --------------------------------------
// Probability ratios that quantify how the block family beats product
// measures on small-count events.

// mu_k(at most one 1) / pi_{1/2+delta}(at most one 1); grows without bound in k.
template <class T>
T block_small_set_ratio(int k, const T& delta) {
  if (!(delta > 0) || !(delta < T(1) / 2))
    fail(ErrKind::ParameterOutOfRange, "need 0 < delta < 1/2");
  T lo = T(1) / 2 - delta, hi = T(1) / 2 + delta;
  T lok = scalar_traits<T>::one(), halfk = scalar_traits<T>::one();
  for (int i = 0; i < k; ++i) {
    lok *= lo;
    halfk *= T(1) / 2;
  }
  return halfk / (lok + k * hi * (lok / lo));
}

// P(thinned block ≡ 0) / P(pi_{1/2} ≡ 0) → eps as k grows.
template <class T>
T noised_allzero_ratio(int k, const T& eps) {
  CountDistribution<T> c = noised_block_counts(k, T(T(1) / 2), eps);
  T halfk = scalar_traits<T>::one();
  for (int i = 0; i < k; ++i) halfk *= T(1) / 2;
  return c[0] / halfk;
}

// P(thinned block has ≤ 1 one) / P(pi_{1/2} has ≤ 1 one) → 0 as k grows.
template <class T>
T noised_small_count_ratio(int k, const T& eps) {
  CountDistribution<T> c = noised_block_counts(k, T(T(1) / 2), eps);
  T halfk = scalar_traits<T>::one();
  for (int i = 0; i < k; ++i) halfk *= T(1) / 2;
  return (c[0] + c[1]) / ((k + 1) * halfk);
}

}  // namespace movelab
