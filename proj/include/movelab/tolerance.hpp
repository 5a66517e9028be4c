#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "movelab/domination.hpp"
#include "movelab/measure.hpp"
#include "movelab/upsets.hpp"

namespace movelab {

// A conditioning attaining (or excluded from) a tolerance infimum: the values
// of all sites except `site`, packed over the remaining sites in ascending
// original order.
struct ToleranceWitness {
  int site = -1;
  Config rest = 0;
};

template <class T>
struct ToleranceReport {
  T insertion;  // inf over sites and positive-probability conditionings of P(1 | rest)
  T deletion;   // same for P(0 | rest)
  T finite_energy;
  ToleranceWitness insertion_witness, deletion_witness;
  std::vector<ToleranceWitness> excluded;  // zero-probability conditionings (audit mode)
};

namespace detail {

inline Config drop_site_bits(Config c, int site) {
  const Config low = (Config{1} << site) - 1;
  return (c & low) | ((c >> (site + 1)) << site);
}

}  // namespace detail

// Scan every site and every conditioning of the other sites; conditionings of
// probability zero don't constrain the infima (they are recorded only when
// audit is requested).
template <class T>
ToleranceReport<T> insertion_tolerance(const BasicMeasure<T>& mu, bool audit = false) {
  const int n = mu.sites();
  ToleranceReport<T> rep{T(2), T(2), T(0), {}, {}, {}};
  for (int s = 0; s < n; ++s) {
    const Config bit = Config{1} << s;
    for (Config c = 0; c < mu.size(); ++c) {
      if (c & bit) continue;
      const T& zero_mass = mu[c];
      const T& one_mass = mu[c | bit];
      T total = zero_mass + one_mass;
      if (!(total > 0)) {
        if (audit) rep.excluded.push_back({s, detail::drop_site_bits(c, s)});
        continue;
      }
      T ins = one_mass / total;
      if (ins < rep.insertion) {
        rep.insertion = ins;
        rep.insertion_witness = {s, detail::drop_site_bits(c, s)};
      }
      T del = zero_mass / total;
      if (del < rep.deletion) {
        rep.deletion = del;
        rep.deletion_witness = {s, detail::drop_site_bits(c, s)};
      }
    }
  }
  rep.finite_energy = rep.insertion < rep.deletion ? rep.insertion : rep.deletion;
  return rep;
}

// Holley-style consequence of uniform insertion tolerance: with
// eps* = insertion_tolerance(mu), the product measure pi_{eps*} must be
// dominated by mu.
template <class T>
bool holley_lower_bound_check(const BasicMeasure<T>& mu) {
  T eps = insertion_tolerance(mu).insertion;
  return dominates(product_measure<T>(mu.ground(), eps), mu).dominated;
}

// Witness of a failed conditional positive-association inequality.
struct FkgViolation {
  std::vector<int> zero_sites;  // sites conditioned to 0
  UpSet a, b;                   // up-sets over the remaining sites (ascending relabel)
};

struct FkgResult {
  bool satisfied = true;
  std::optional<FkgViolation> violation;
};

// Downwards-FKG: for every S' with mu(sigma(S') ≡ 0) > 0 and every pair of
// up-sets A, B over the remaining sites, the conditioned measure must satisfy
// mu'(A ∩ B) ≥ mu'(A) mu'(B). Cost explodes with the Dedekind numbers, so
// n ≤ 4 unless five-site checking is explicitly requested. Exact mode screens
// pairs in floating point and recomputes near-boundary pairs exactly.
template <class T>
FkgResult downwards_fkg_check(const BasicMeasure<T>& mu, bool allow_five_sites = false) {
  const int n = mu.sites();
  const int cap = allow_five_sites ? std::max(limits().fkg_sites, 5) : limits().fkg_sites;
  if (n > cap)
    fail(ErrKind::SizeExceeded, "pairwise up-set check capped at n=" + std::to_string(cap));

  std::vector<std::vector<std::uint64_t>> upsets_by_m(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) upsets_by_m[static_cast<std::size_t>(m)] = all_up_set_masks(m);

  for (Config z = 0; z < mu.size(); ++z) {  // z = bitmask of S'
    const int m = n - popcount(z);
    if (m == 0) continue;  // no remaining sites: inequality is vacuous

    // Conditioned measure over the remaining sites, kept unnormalized until
    // the end (divide once).
    std::vector<int> rest_sites;
    for (int i = 0; i < n; ++i)
      if (!(z >> i & 1u)) rest_sites.push_back(i);
    std::vector<T> w(std::size_t{1} << m, scalar_traits<T>::zero());
    T total = scalar_traits<T>::zero();
    for (Config r = 0; r < w.size(); ++r) {
      Config c = 0;
      for (int j = 0; j < m; ++j)
        if (r >> j & 1u) c |= Config{1} << rest_sites[static_cast<std::size_t>(j)];
      w[r] = mu[c];
      total += mu[c];
    }
    if (!(total > 0)) continue;  // zero-probability conditioning: skipped
    for (T& x : w) x = x / total;

    const auto& masks = upsets_by_m[static_cast<std::size_t>(m)];
    std::vector<T> mass(masks.size());
    std::vector<double> mass_d(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) {
      T acc = scalar_traits<T>::zero();
      for (std::uint64_t mm = masks[i]; mm;) {
        int c = std::countr_zero(mm);
        mm &= mm - 1;
        acc += w[static_cast<std::size_t>(c)];
      }
      mass[i] = acc;
      mass_d[i] = to_double(acc);
    }

    auto exact_mass_of = [&](std::uint64_t mask) {
      T acc = scalar_traits<T>::zero();
      for (std::uint64_t mm = mask; mm;) {
        int c = std::countr_zero(mm);
        mm &= mm - 1;
        acc += w[static_cast<std::size_t>(c)];
      }
      return acc;
    };

    for (std::size_t i = 0; i < masks.size(); ++i) {
      for (std::size_t j = i; j < masks.size(); ++j) {
        bool bad;
        if constexpr (scalar_traits<T>::exact) {
          double lhs_d = 0;
          for (std::uint64_t mm = masks[i] & masks[j]; mm;) {
            int c = std::countr_zero(mm);
            mm &= mm - 1;
            lhs_d += to_double(w[static_cast<std::size_t>(c)]);
          }
          if (lhs_d - mass_d[i] * mass_d[j] > 1e-9) continue;  // safely positive
          bad = exact_mass_of(masks[i] & masks[j]) < mass[i] * mass[j];
        } else {
          T lhs = exact_mass_of(masks[i] & masks[j]);
          bad = lhs < mass[i] * mass[j] - scalar_traits<T>::flow_slack();
        }
        if (bad) {
          FkgResult res;
          res.satisfied = false;
          FkgViolation v;
          for (int site = 0; site < n; ++site)
            if (z >> site & 1u) v.zero_sites.push_back(site);
          v.a = up_set_from_mask(masks[i], m);
          v.b = up_set_from_mask(masks[j], m);
          res.violation = std::move(v);
          return res;
        }
      }
    }
  }
  return {};
}

// Thinning a delta-insertion-tolerant measure multiplies the all-zeros
// probability by at most (1 + eps*delta/(1-delta))^-n; checked here from the
// other side, exactly: P(thinned ≡ 0) ≥ (1 + eps*delta/(1-delta))^n P(≡ 0).
template <class T>
bool thinning_zeros_amplification_check(const BasicMeasure<T>& mu, const T& delta, const T& eps) {
  if (!(delta > 0) || !(delta < 1) || !(eps > 0) || !(eps < 1))
    fail(ErrKind::ParameterOutOfRange, "need 0 < delta < 1 and 0 < eps < 1");
  if (insertion_tolerance(mu).insertion < delta)
    fail(ErrKind::ToleranceTooLow, "measure is not delta-insertion tolerant");
  const int n = mu.sites();
  std::vector<T> eps_pow(static_cast<std::size_t>(n) + 1);
  eps_pow[0] = scalar_traits<T>::one();
  for (int j = 1; j <= n; ++j) eps_pow[static_cast<std::size_t>(j)] = eps_pow[static_cast<std::size_t>(j - 1)] * eps;
  T lhs = scalar_traits<T>::zero();  // P(every 1 erased by the down-eps channel)
  for (Config c = 0; c < mu.size(); ++c)
    if (mu[c] > 0) lhs += mu[c] * eps_pow[static_cast<std::size_t>(popcount(c))];
  T factor = 1 + eps * delta / (1 - delta);
  T rhs = mu[0];
  for (int j = 0; j < n; ++j) rhs *= factor;
  return lhs >= rhs;
}

// Reporting utility for the negative-association product criterion: the
// largest rho consistent with rho^m ≤ mu(sites 0..m-1 all ones), per m.
template <class T>
std::vector<double> cna_rho_bounds(const BasicMeasure<T>& mu) {
  const int n = mu.sites();
  std::vector<double> out;
  for (int m = 1; m <= n; ++m) {
    const Config mask = static_cast<Config>((std::uint64_t{1} << m) - 1);
    T acc = scalar_traits<T>::zero();
    for (Config c = 0; c < mu.size(); ++c)
      if ((c & mask) == mask) acc += mu[c];
    out.push_back(std::pow(to_double(acc), 1.0 / m));
  }
  return out;
}

}  // namespace movelab
