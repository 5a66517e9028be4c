#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "movelab/errors.hpp"
#include "movelab/rational.hpp"

namespace movelab {

// A configuration of n sites, site i stored in bit i.
using Config = std::uint32_t;

inline int popcount(Config c) { return std::popcount(c); }

// Size caps. Operations reject larger instances with SizeExceeded instead of
// degrading. MOVELAB_NCAP raises/lowers the measure caps at process start.
struct Limits {
  int exact_sites = 18;
  int float_sites = 22;
  int flow_sites = 14;    // dominates(): 3^n edge bound
  int upset_sites = 6;    // enumerate_up_sets
  int fkg_sites = 4;      // downwards_fkg_check default (5 opt-in)
  int window_points = 12; // determinantal windows
};

inline Limits& limits() {
  static Limits l = [] {
    Limits v;
    if (const char* e = std::getenv("MOVELAB_NCAP")) {
      int n = std::atoi(e);
      if (n >= 1 && n <= 26) {
        v.exact_sites = n;
        v.float_sites = n;
      }
    }
    return v;
  }();
  return l;
}

template <class T>
int site_cap() {
  return scalar_traits<T>::exact ? limits().exact_sites : limits().float_sites;
}

// bitstring: leftmost character is site 0.
inline std::string config_to_bitstring(Config c, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (c >> i & 1u) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

inline Config config_from_bitstring(const std::string& s, int n) {
  if (static_cast<int>(s.size()) != n)
    fail(ErrKind::ParseError, "bitstring '" + s + "' is not " + std::to_string(n) + " chars");
  Config c = 0;
  for (int i = 0; i < n; ++i) {
    if (s[static_cast<std::size_t>(i)] == '1')
      c |= Config{1} << i;
    else if (s[static_cast<std::size_t>(i)] != '0')
      fail(ErrKind::ParseError, "bitstring '" + s + "' has non-binary characters");
  }
  return c;
}

struct GroundSet {
  int n = 0;
  std::optional<std::vector<std::string>> labels;

  explicit GroundSet(int n_sites, std::optional<std::vector<std::string>> names = std::nullopt)
      : n(n_sites), labels(std::move(names)) {
    if (n < 1 || n > limits().float_sites)
      fail(ErrKind::SizeExceeded,
           "ground set size " + std::to_string(n) + " outside [1," +
               std::to_string(limits().float_sites) + "]");
    if (labels) {
      if (static_cast<int>(labels->size()) != n)
        fail(ErrKind::ParameterOutOfRange, "label count != n");
      std::set<std::string> uniq(labels->begin(), labels->end());
      if (static_cast<int>(uniq.size()) != n)
        fail(ErrKind::ParameterOutOfRange, "labels not distinct");
    }
  }

  std::size_t space_size() const { return std::size_t{1} << n; }
  Config full_mask() const { return static_cast<Config>((std::uint64_t{1} << n) - 1); }

  friend bool operator==(const GroundSet& a, const GroundSet& b) {
    return a.n == b.n && a.labels == b.labels;
  }
};

// Per-site independent flip rates: each 1 drops to 0 with probability `down`,
// each 0 rises to 1 with probability `up`.
template <class T>
struct NoiseChannel {
  T down;
  T up;

  NoiseChannel(T down_rate, T up_rate) : down(std::move(down_rate)), up(std::move(up_rate)) {
    if (down < 0 || down > 1 || up < 0 || up > 1)
      fail(ErrKind::ParameterOutOfRange, "channel rates must lie in [0,1]");
  }

  static NoiseChannel identity() { return NoiseChannel(T(0), T(0)); }
  bool invertible() const { return down + up < 1; }
};

// Applying `first` then `second` collapses to one channel: the per-site 2x2
// transition matrices multiply and the product is again of the same form.
template <class T>
NoiseChannel<T> compose_channels(const NoiseChannel<T>& first, const NoiseChannel<T>& second) {
  T down = (1 - second.up) * first.down + second.down * (1 - first.down);
  T up = second.up * (1 - first.up) + (1 - second.down) * first.up;
  return NoiseChannel<T>(std::move(down), std::move(up));
}

template <class T>
class CountDistribution;

// Probability measure on {0,1}^n, dense over configuration bitmasks.
// Immutable after construction; construction validates nonnegativity and
// normalization (exact sum in rational mode, 1e-12 slack in float mode) and
// never repairs them.
template <class T>
class BasicMeasure {
 public:
  BasicMeasure(GroundSet ground, std::vector<T> probs)
      : ground_(std::move(ground)), probs_(std::move(probs)) {
    if (ground_.n > site_cap<T>())
      fail(ErrKind::SizeExceeded, "n=" + std::to_string(ground_.n) + " exceeds mode cap " +
                                      std::to_string(site_cap<T>()));
    if (probs_.size() != ground_.space_size())
      fail(ErrKind::ParameterOutOfRange, "probability vector has wrong length");
    T sum = scalar_traits<T>::zero();
    for (const T& p : probs_) {
      if (p < 0) fail(ErrKind::NegativeMass, "negative probability entry");
      sum += p;
    }
    T slack = scalar_traits<T>::sum_slack();
    if (sum > 1 + slack || sum < 1 - slack)
      fail(ErrKind::NotNormalized, "entries sum to " + std::to_string(to_double(sum)));
  }

  static BasicMeasure from_entries(GroundSet ground,
                                   const std::vector<std::pair<Config, T>>& entries) {
    std::vector<T> probs(ground.space_size(), scalar_traits<T>::zero());
    std::vector<char> seen(ground.space_size(), 0);
    for (const auto& [cfg, p] : entries) {
      if (cfg > ground.full_mask())
        fail(ErrKind::ParameterOutOfRange, "configuration outside {0,1}^n");
      if (seen[cfg]) fail(ErrKind::DuplicateConfiguration, config_to_bitstring(cfg, ground.n));
      seen[cfg] = 1;
      probs[cfg] = p;
    }
    return BasicMeasure(std::move(ground), std::move(probs));
  }

  const GroundSet& ground() const { return ground_; }
  int sites() const { return ground_.n; }
  std::size_t size() const { return probs_.size(); }
  const T& operator[](Config c) const { return probs_[c]; }
  const std::vector<T>& probs() const { return probs_; }

  friend bool operator==(const BasicMeasure& a, const BasicMeasure& b) {
    return a.ground_ == b.ground_ && a.probs_ == b.probs_;
  }

 private:
  GroundSet ground_;
  std::vector<T> probs_;
};

using MeasureQ = BasicMeasure<Rat>;
using MeasureD = BasicMeasure<double>;

// Signed vector over {0,1}^n whose entries sum to 1 but may be negative.
// Channel inversion lands here whenever no genuine preimage measure exists.
template <class T>
class SignedVector {
 public:
  SignedVector(GroundSet ground, std::vector<T> values)
      : ground_(std::move(ground)), values_(std::move(values)) {
    if (ground_.n > site_cap<T>())
      fail(ErrKind::SizeExceeded, "n=" + std::to_string(ground_.n) + " exceeds mode cap");
    if (values_.size() != ground_.space_size())
      fail(ErrKind::ParameterOutOfRange, "value vector has wrong length");
    T sum = scalar_traits<T>::zero();
    for (const T& v : values_) sum += v;
    T slack = scalar_traits<T>::sum_slack();
    if (sum > 1 + slack || sum < 1 - slack)
      fail(ErrKind::NotNormalized, "signed vector entries must sum to 1");
  }

  const GroundSet& ground() const { return ground_; }
  int sites() const { return ground_.n; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](Config c) const { return values_[c]; }
  const std::vector<T>& values() const { return values_; }

  bool is_nonnegative() const {
    for (const T& v : values_)
      if (v < 0) return false;
    return true;
  }

  BasicMeasure<T> to_measure() const {
    if (!is_nonnegative())
      fail(ErrKind::NegativeMass, "signed vector has negative entries");
    return BasicMeasure<T>(ground_, values_);
  }

  friend bool operator==(const SignedVector& a, const SignedVector& b) {
    return a.ground_ == b.ground_ && a.values_ == b.values_;
  }

 private:
  GroundSet ground_;
  std::vector<T> values_;
};

namespace detail {

// In-place per-site tensor sweep: for every site, map each (bit=0, bit=1)
// value pair through the 2x2 matrix [[m00, m01], [m10, m11]] (column = input
// state). O(n * 2^n) overall.
template <class T>
void site_matrix_sweep(std::vector<T>& v, int n, const std::type_identity_t<T>& m00,
                       const std::type_identity_t<T>& m01, const std::type_identity_t<T>& m10,
                       const std::type_identity_t<T>& m11) {
  const std::size_t full = std::size_t{1} << n;
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t lo = 0; lo < full; ++lo) {
      if (lo & bit) continue;
      T& v0 = v[lo];
      T& v1 = v[lo | bit];
      T n0 = m00 * v0 + m01 * v1;
      T n1 = m10 * v0 + m11 * v1;
      v0 = std::move(n0);
      v1 = std::move(n1);
    }
  }
}

}  // namespace detail

template <class T>
BasicMeasure<T> product_measure(GroundSet ground, const T& p) {
  if (p < 0 || p > 1) fail(ErrKind::ParameterOutOfRange, "product parameter outside [0,1]");
  const int n = ground.n;
  std::vector<T> probs(ground.space_size());
  std::vector<T> pk(static_cast<std::size_t>(n) + 1), qk(static_cast<std::size_t>(n) + 1);
  pk[0] = scalar_traits<T>::one();
  qk[0] = scalar_traits<T>::one();
  for (int j = 1; j <= n; ++j) {
    pk[j] = pk[j - 1] * p;
    qk[j] = qk[j - 1] * (1 - p);
  }
  for (Config c = 0; c < probs.size(); ++c) {
    int k = popcount(c);
    probs[c] = pk[k] * qk[n - k];
  }
  return BasicMeasure<T>(std::move(ground), std::move(probs));
}

template <class T>
BasicMeasure<T> point_mass(GroundSet ground, Config at) {
  std::vector<T> probs(ground.space_size(), scalar_traits<T>::zero());
  probs.at(at) = scalar_traits<T>::one();
  return BasicMeasure<T>(std::move(ground), std::move(probs));
}

template <class T>
BasicMeasure<T> mixture(const std::vector<T>& weights,
                        const std::vector<BasicMeasure<T>>& measures) {
  if (weights.empty() || weights.size() != measures.size())
    fail(ErrKind::BadWeights, "weights and measures must pair up");
  T wsum = scalar_traits<T>::zero();
  for (const T& w : weights) {
    if (w < 0) fail(ErrKind::BadWeights, "negative mixture weight");
    wsum += w;
  }
  T slack = scalar_traits<T>::sum_slack();
  if (wsum > 1 + slack || wsum < 1 - slack) fail(ErrKind::BadWeights, "weights must sum to 1");
  const GroundSet& g = measures.front().ground();
  for (const auto& m : measures)
    if (!(m.ground() == g)) fail(ErrKind::GroundMismatch, "mixture over different ground sets");
  std::vector<T> probs(g.space_size(), scalar_traits<T>::zero());
  for (std::size_t k = 0; k < measures.size(); ++k)
    for (Config c = 0; c < probs.size(); ++c) probs[c] += weights[k] * measures[k][c];
  return BasicMeasure<T>(g, std::move(probs));
}

// Exact push-forward through the noise channel, one site at a time.
template <class T>
BasicMeasure<T> apply_channel(const BasicMeasure<T>& mu, const NoiseChannel<T>& ch) {
  std::vector<T> v = mu.probs();
  detail::site_matrix_sweep(v, mu.sites(), T(1 - ch.up), ch.down, ch.up, T(1 - ch.down));
  return BasicMeasure<T>(mu.ground(), std::move(v));
}

template <class T>
BasicMeasure<T> complement(const BasicMeasure<T>& mu) {
  const Config full = mu.ground().full_mask();
  std::vector<T> probs(mu.size());
  for (Config c = 0; c < probs.size(); ++c) probs[c] = mu[full ^ c];
  return BasicMeasure<T>(mu.ground(), std::move(probs));
}

// Normalized restriction of mu to {sigma : sigma(site)=value for each fixed
// (site, value)}, as a measure on the remaining sites (original order kept).
template <class T>
BasicMeasure<T> condition(const BasicMeasure<T>& mu,
                          const std::vector<std::pair<int, int>>& fixed) {
  const int n = mu.sites();
  Config fixed_mask = 0, fixed_vals = 0;
  for (const auto& [site, value] : fixed) {
    if (site < 0 || site >= n) fail(ErrKind::ParameterOutOfRange, "site index out of range");
    if (value != 0 && value != 1) fail(ErrKind::ParameterOutOfRange, "site value must be 0/1");
    Config bit = Config{1} << site;
    if (fixed_mask & bit) fail(ErrKind::DuplicateConfiguration, "site fixed twice");
    fixed_mask |= bit;
    if (value) fixed_vals |= bit;
  }
  if (popcount(fixed_mask) >= n)
    fail(ErrKind::ParameterOutOfRange, "conditioning must leave at least one free site");

  std::vector<int> free_sites;
  for (int i = 0; i < n; ++i)
    if (!(fixed_mask >> i & 1u)) free_sites.push_back(i);
  const int m = static_cast<int>(free_sites.size());

  std::vector<T> probs(std::size_t{1} << m, scalar_traits<T>::zero());
  T total = scalar_traits<T>::zero();
  for (Config r = 0; r < probs.size(); ++r) {
    Config c = fixed_vals;
    for (int j = 0; j < m; ++j)
      if (r >> j & 1u) c |= Config{1} << free_sites[j];
    probs[r] = mu[c];
    total += mu[c];
  }
  if (total == 0) fail(ErrKind::ZeroProbabilityEvent, "conditioning event has probability 0");
  for (T& p : probs) p = p / total;

  std::optional<std::vector<std::string>> labels;
  if (mu.ground().labels) {
    labels.emplace();
    for (int j : free_sites) labels->push_back((*mu.ground().labels)[static_cast<std::size_t>(j)]);
  }
  return BasicMeasure<T>(GroundSet(m, std::move(labels)), std::move(probs));
}

// True iff the support is closed under raising single bits.
template <class T>
bool support_is_up_set(const BasicMeasure<T>& mu) {
  const int n = mu.sites();
  for (Config c = 0; c < mu.size(); ++c) {
    if (!(mu[c] > 0)) continue;
    for (int i = 0; i < n; ++i) {
      Config up = c | (Config{1} << i);
      if (up != c && !(mu[up] > 0)) return false;
    }
  }
  return true;
}

// Product of two measures on the disjoint union of their sites (first
// factor's sites come first).
template <class T>
BasicMeasure<T> tensor_product(const BasicMeasure<T>& a, const BasicMeasure<T>& b) {
  const int n = a.sites() + b.sites();
  if (n > site_cap<T>()) fail(ErrKind::SizeExceeded, "product ground set exceeds cap");
  std::vector<T> probs(std::size_t{1} << n);
  for (Config cb = 0; cb < b.size(); ++cb) {
    Config high = cb << a.sites();
    for (Config ca = 0; ca < a.size(); ++ca) probs[high | ca] = a[ca] * b[cb];
  }
  return BasicMeasure<T>(GroundSet(n), std::move(probs));
}

// Law of the number of 1's.
template <class T>
class CountDistribution {
 public:
  CountDistribution(int n, std::vector<T> probs) : n_(n), probs_(std::move(probs)) {
    if (n_ < 0 || probs_.size() != static_cast<std::size_t>(n_) + 1)
      fail(ErrKind::LengthMismatch, "count distribution needs n+1 entries");
    T sum = scalar_traits<T>::zero();
    for (const T& p : probs_) {
      if (p < 0) fail(ErrKind::NegativeMass, "negative count probability");
      sum += p;
    }
    T slack = scalar_traits<T>::sum_slack();
    if (sum > 1 + slack || sum < 1 - slack)
      fail(ErrKind::NotNormalized, "count probabilities must sum to 1");
  }

  int n() const { return n_; }
  const T& operator[](int k) const { return probs_[static_cast<std::size_t>(k)]; }
  const std::vector<T>& probs() const { return probs_; }

  // P(count >= j)
  T tail(int j) const {
    T t = scalar_traits<T>::zero();
    for (int k = std::max(j, 0); k <= n_; ++k) t += probs_[static_cast<std::size_t>(k)];
    return t;
  }

  friend bool operator==(const CountDistribution& a, const CountDistribution& b) {
    return a.n_ == b.n_ && a.probs_ == b.probs_;
  }

 private:
  int n_;
  std::vector<T> probs_;
};

template <class T>
CountDistribution<T> count_distribution(const BasicMeasure<T>& mu) {
  std::vector<T> counts(static_cast<std::size_t>(mu.sites()) + 1, scalar_traits<T>::zero());
  for (Config c = 0; c < mu.size(); ++c) counts[static_cast<std::size_t>(popcount(c))] += mu[c];
  return CountDistribution<T>(mu.sites(), std::move(counts));
}

template <class T>
CountDistribution<T> binomial_counts(int n, const T& p) {
  if (p < 0 || p > 1) fail(ErrKind::ParameterOutOfRange, "binomial parameter outside [0,1]");
  std::vector<T> probs(static_cast<std::size_t>(n) + 1);
  std::vector<T> pk(probs.size()), qk(probs.size());
  pk[0] = scalar_traits<T>::one();
  qk[0] = scalar_traits<T>::one();
  for (int j = 1; j <= n; ++j) {
    pk[j] = pk[j - 1] * p;
    qk[j] = qk[j - 1] * (1 - p);
  }
  for (int k = 0; k <= n; ++k) {
    T coef;
    if constexpr (scalar_traits<T>::exact)
      coef = binomial_coeff(static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    else
      coef = to_double(binomial_coeff(static_cast<unsigned long>(n), static_cast<unsigned long>(k)));
    probs[static_cast<std::size_t>(k)] = coef * pk[k] * qk[n - k];
  }
  return CountDistribution<T>(n, std::move(probs));
}

// Count law after the noise channel: j surviving 1's ~ Bin(j, 1-down) plus an
// independent Bin(n-j, up) of raised 0's. This is the exchangeable-level image
// of apply_channel; zero input levels are skipped so sparse count laws stay
// cheap even for large n.
template <class T>
CountDistribution<T> push_counts_through_channel(const CountDistribution<T>& counts,
                                                 const NoiseChannel<T>& ch) {
  const int n = counts.n();
  std::vector<T> out(static_cast<std::size_t>(n) + 1, scalar_traits<T>::zero());
  for (int j = 0; j <= n; ++j) {
    if (!(counts[j] > 0)) continue;
    CountDistribution<T> stay = binomial_counts(j, T(1 - ch.down));
    CountDistribution<T> rise = binomial_counts(n - j, ch.up);
    for (int a = 0; a <= j; ++a) {
      if (!(stay[a] > 0)) continue;
      T w = counts[j] * stay[a];
      for (int b = 0; b <= n - j; ++b) out[static_cast<std::size_t>(a + b)] += w * rise[b];
    }
  }
  return CountDistribution<T>(n, std::move(out));
}

}  // namespace movelab
