#include "movelab/domination.hpp"

#include <array>
#include <cmath>
#include <unordered_set>

namespace movelab {

namespace {

// Up-sets with equal level profile and equal mass share their critical level,
// so root isolation runs once per (profile, mass) class. The mass key is an
// integer against the lcm denominator when that fits 62 bits, else a string.
struct CandKey {
  std::uint64_t profile = 0;
  std::int64_t scaled = 0;
  std::string fallback;
  bool operator==(const CandKey&) const = default;
};

struct CandKeyHash {
  std::size_t operator()(const CandKey& k) const {
    std::size_t h = std::hash<std::uint64_t>{}(k.profile);
    h ^= std::hash<std::int64_t>{}(k.scaled) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    if (!k.fallback.empty())
      h ^= std::hash<std::string>{}(k.fallback) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct Candidate {
  std::array<int, 7> levels{};
  Rat mass;
  double est = 1.0;
  bool refined = false;
  Rat lo = 0, hi = 1;
};

Rat level_profile_mass(const std::array<int, 7>& levels, int n, const Rat& p) {
  Rat q = 1 - p;
  std::array<Rat, 7> pj, qj;
  pj[0] = 1;
  qj[0] = 1;
  for (int j = 1; j <= n; ++j) {
    pj[static_cast<std::size_t>(j)] = pj[static_cast<std::size_t>(j - 1)] * p;
    qj[static_cast<std::size_t>(j)] = qj[static_cast<std::size_t>(j - 1)] * q;
  }
  Rat s = 0;
  for (int j = 0; j <= n; ++j)
    if (levels[static_cast<std::size_t>(j)])
      s += levels[static_cast<std::size_t>(j)] * pj[static_cast<std::size_t>(j)] *
           qj[static_cast<std::size_t>(n - j)];
  return s;
}

double level_profile_mass_d(const std::array<int, 7>& levels, int n, double p) {
  double s = 0;
  for (int j = 0; j <= n; ++j)
    if (levels[static_cast<std::size_t>(j)])
      s += levels[static_cast<std::size_t>(j)] * std::pow(p, j) * std::pow(1 - p, n - j);
  return s;
}

// Bring [lo, hi] around the root of pi_p(A) = mass down to width tol with
// exact sign tests; invariant pi_lo <= mass < pi_hi.
void refine(Candidate& c, int n, double tol) {
  c.lo = 0;
  c.hi = 1;
  for (int iter = 0; iter < 200 && to_double(c.hi - c.lo) > tol; ++iter) {
    Rat mid = (c.lo + c.hi) / 2;
    if (level_profile_mass(c.levels, n, mid) <= c.mass)
      c.lo = mid;
    else
      c.hi = mid;
  }
  c.refined = true;
}

}  // namespace

Rat p_max_oracle(const MeasureQ& mu, double tol) {
  const int n = mu.sites();
  if (n > limits().upset_sites)
    fail(ErrKind::SizeExceeded,
         "up-set oracle capped at n=" + std::to_string(limits().upset_sites));
  if (!(tol > 0)) fail(ErrKind::ParameterOutOfRange, "tol must be positive");
  if (!(mu[mu.ground().full_mask()] > 0)) return 0;

  const Config space = static_cast<Config>(mu.size());
  mpz_class lcm_den = 1;
  for (Config c = 0; c < space; ++c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
                                             mu[c].get_den().get_mpz_t());
  const bool fast = mpz_sizeinbase(lcm_den.get_mpz_t(), 2) <= 62;
  std::vector<std::int64_t> scaled(space, 0);
  if (fast) {
    for (Config c = 0; c < space; ++c) {
      mpz_class v = mu[c].get_num() * (lcm_den / mu[c].get_den());
      scaled[c] = static_cast<std::int64_t>(v.get_si());
    }
  }

  const std::uint64_t full_upset =
      space == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << space) - 1;
  std::unordered_set<CandKey, CandKeyHash> seen;
  std::vector<Candidate> cands;
  for_each_up_set(n, [&](std::uint64_t mask) {
    if (mask == 0 || mask == full_upset) return;  // no constraint from ∅ / full
    CandKey key;
    std::array<int, 7> levels{};
    std::int64_t acc = 0;
    for (std::uint64_t m = mask; m;) {
      int c = std::countr_zero(m);
      m &= m - 1;
      ++levels[static_cast<std::size_t>(popcount(static_cast<Config>(c)))];
      if (fast) acc += scaled[static_cast<std::size_t>(c)];
    }
    for (int j = 0; j <= n; ++j)
      key.profile = key.profile << 5 | static_cast<std::uint64_t>(levels[static_cast<std::size_t>(j)]);
    Rat mass;
    if (fast) {
      key.scaled = acc;
    } else {
      for (std::uint64_t m = mask; m;) {
        int c = std::countr_zero(m);
        m &= m - 1;
        mass += mu[static_cast<Config>(c)];
      }
      key.fallback = rat_to_string(mass);
    }
    if (!seen.insert(key).second) return;
    Candidate cand;
    cand.levels = levels;
    cand.mass = fast ? Rat(mpz_class(acc)) / Rat(lcm_den) : mass;
    cands.push_back(std::move(cand));
  });

  // Nonempty up-sets contain all-ones, so every mass is ≥ mu(all-ones) > 0.
  double best_est = 1.0;
  for (Candidate& c : cands) {
    if (c.mass >= 1) {  // pi_p(A) ≤ 1 always: unconstraining
      c.est = 2.0;
      continue;
    }
    double lo = 0, hi = 1, target = to_double(c.mass);
    for (int iter = 0; iter < 60; ++iter) {
      double mid = (lo + hi) / 2;
      (level_profile_mass_d(c.levels, n, mid) <= target ? lo : hi) = mid;
    }
    c.est = lo;
    best_est = std::min(best_est, lo);
  }

  Rat best = 1;
  bool have = false;
  for (Candidate& c : cands)
    if (c.est <= best_est + 1e-6) {
      refine(c, n, tol / 2);
      if (!have || c.lo < best) best = c.lo;
      have = true;
    }
  if (!have) return 1;  // only unconstraining up-sets: mu = point mass at all-ones

  // Certify against every class exactly; float ordering may have hidden the
  // true minimum, in which case refine the offender and shrink.
  for (bool dirty = true; dirty;) {
    dirty = false;
    for (Candidate& c : cands) {
      if (c.refined || c.mass >= 1) continue;
      if (level_profile_mass(c.levels, n, best) > c.mass) {
        refine(c, n, tol / 2);
        if (c.lo < best) best = c.lo;
        dirty = true;
      }
    }
  }
  return best;
}

}  // namespace movelab
