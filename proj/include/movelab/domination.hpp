#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "movelab/flow.hpp"
#include "movelab/measure.hpp"
#include "movelab/upsets.hpp"

namespace movelab {

// Outcome of a stochastic-domination query mu1 ⪯ mu2. Exactly one side is
// populated: a monotone coupling (rows marginal mu1, columns mu2, support on
// pairs x ⊆ y) or a violating up-set A with mu1(A) > mu2(A).
template <class T>
struct DominationCertificate {
  bool dominated = false;
  std::vector<std::tuple<Config, Config, T>> coupling;  // (lower, upper, mass)
  UpSet violator;
};

template <class T>
struct AnalysisResult {
  T p_max;
  T sup_eps_down;  // movability radius of (pi_{p_max - tol}, mu)
  bool rigid;
  T tolerance_used;
};

namespace detail {

template <class T>
bool flow_reaches_one(const T& flow) {
  if constexpr (scalar_traits<T>::exact)
    return flow >= 1;
  else
    return flow >= 1.0 - scalar_traits<T>::flow_slack();
}

}  // namespace detail

// Strassen via max-flow: source→x with capacity mu1(x), x→y for every x ⊆ y
// (capacity 2, effectively infinite), y→sink with capacity mu2(y). mu1 ⪯ mu2
// iff the max flow is 1; the flow decomposes into a monotone coupling, and
// otherwise the source side of a min cut yields a violating up-set.
template <class T>
DominationCertificate<T> dominates(const BasicMeasure<T>& mu1, const BasicMeasure<T>& mu2) {
  if (!(mu1.ground() == mu2.ground()))
    fail(ErrKind::GroundMismatch, "domination needs a common ground set");
  const int n = mu1.sites();
  if (n > limits().flow_sites)
    fail(ErrKind::SizeExceeded,
         "domination flow capped at n=" + std::to_string(limits().flow_sites) +
             " (3^n comparability edges)");

  const Config space = static_cast<Config>(mu1.size());
  const Config full = mu1.ground().full_mask();
  const int source = 2 * static_cast<int>(space);
  const int sink = source + 1;
  FlowNetwork<T> net(sink + 1);

  for (Config x = 0; x < space; ++x)
    if (mu1[x] > 0) net.add_edge(source, static_cast<int>(x), mu1[x]);
  for (Config y = 0; y < space; ++y)
    if (mu2[y] > 0) net.add_edge(static_cast<int>(space + y), sink, mu2[y]);

  std::vector<std::tuple<std::size_t, Config, Config>> middle;  // (edge id, x, y)
  for (Config x = 0; x < space; ++x) {
    if (!(mu1[x] > 0)) continue;
    const Config rest = full ^ x;
    for (Config s = rest;; s = (s - 1) & rest) {
      Config y = x | s;
      if (mu2[y] > 0)
        middle.emplace_back(net.add_edge(static_cast<int>(x), static_cast<int>(space + y), T(2)),
                            x, y);
      if (s == 0) break;
    }
  }

  T flow = net.max_flow(source, sink);
  DominationCertificate<T> cert;
  if (detail::flow_reaches_one(flow)) {
    cert.dominated = true;
    for (const auto& [id, x, y] : middle) {
      const T& f = net.flow_on(id);
      if (f > 0) cert.coupling.emplace_back(x, y, f);
    }
    return cert;
  }

  // Min cut never crosses a capacity-2 middle edge, so every support config of
  // mu2 above a reachable support config of mu1 is itself reachable; the
  // up-closure of the reachable mu1-support is therefore a violating up-set.
  std::vector<char> reach = net.residual_reachable(source);
  std::vector<char> member(space, 0);
  for (Config x = 0; x < space; ++x)
    if (mu1[x] > 0 && reach[static_cast<std::size_t>(x)]) member[x] = 1;
  up_close(member, n);
  cert.violator.n = n;
  for (Config c = 0; c < space; ++c)
    if (member[c]) cert.violator.members.push_back(c);
  return cert;
}

// Independent re-derivation of certificate validity (used by tests and the
// CLI --certificate path; does not trust the flow solver).
template <class T>
bool certificate_is_sound(const DominationCertificate<T>& cert, const BasicMeasure<T>& mu1,
                          const BasicMeasure<T>& mu2) {
  const T slack = scalar_traits<T>::flow_slack();
  if (cert.dominated) {
    std::vector<T> row(mu1.size(), scalar_traits<T>::zero());
    std::vector<T> col(mu2.size(), scalar_traits<T>::zero());
    for (const auto& [x, y, m] : cert.coupling) {
      if ((x & ~y) != 0) return false;  // support must be comparable pairs
      if (m < 0) return false;
      row[x] += m;
      col[y] += m;
    }
    for (Config c = 0; c < mu1.size(); ++c) {
      T dr = row[c] - mu1[c], dc = col[c] - mu2[c];
      if (dr > slack || -dr > slack || dc > slack || -dc > slack) return false;
    }
    return true;
  }
  if (!up_set_is_closed(cert.violator)) return false;
  T m1 = scalar_traits<T>::zero(), m2 = scalar_traits<T>::zero();
  for (Config c : cert.violator.members) {
    m1 += mu1[c];
    m2 += mu2[c];
  }
  return m1 > m2;
}

// Exchangeable shortcut: with both measures symmetric under site permutations,
// domination reduces to tail ordering of the count-of-ones laws.
template <class T>
bool dominates_symmetric(const CountDistribution<T>& c1, const CountDistribution<T>& c2) {
  if (c1.n() != c2.n())
    fail(ErrKind::LengthMismatch, "count distributions live on different n");
  const T slack = scalar_traits<T>::flow_slack();
  for (int j = 1; j <= c1.n(); ++j)
    if (c1.tail(j) > c2.tail(j) + slack) return false;
  return true;
}

namespace detail {

// Largest x in [0, hi] with feasible(x), assuming feasible(0) and that the
// feasible set is an interval containing 0. Probes at exact scalar midpoints;
// returns a feasible lower bound within tol (exactly 0 when nothing above 0
// is found). Verifies the bracket invariant at the end.
template <class T, class Feasible>
T sup_bisect(const Feasible& feasible, const T& hi_cap, double tol) {
  if (!(tol > 0)) fail(ErrKind::ParameterOutOfRange, "tol must be positive");
  if (feasible(hi_cap)) return hi_cap;
  T lo = scalar_traits<T>::zero();
  T hi = hi_cap;
  for (int iter = 0; iter < 80 && to_double(hi - lo) > tol; ++iter) {
    T mid = (lo + hi) / 2;
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  if (lo > 0 && !feasible(lo))
    fail(ErrKind::NumericallyInvalid, "bisection invariant lost: returned point infeasible");
  if (feasible(hi))
    fail(ErrKind::NumericallyInvalid, "bisection invariant lost: bracket top feasible");
  return lo;
}

}  // namespace detail

// Largest p (within tol) with pi_p ⪯ mu, by bisection over domination calls.
template <class T>
T p_max(const BasicMeasure<T>& mu, double tol = 1e-9) {
  const GroundSet& g = mu.ground();
  auto feasible = [&](const T& p) { return dominates(product_measure<T>(g, p), mu).dominated; };
  return detail::sup_bisect<T>(feasible, scalar_traits<T>::one(), tol);
}

// Exhaustive-up-set oracle for p_max on n ≤ 6: for every up-set A the critical
// level solves pi_p(A) = mu(A); p_max is the minimum over A. Up-sets are
// deduplicated by (level profile, mass) before root isolation, candidates near
// the minimum are refined by exact rational bisection, and the returned value
// is certified exactly against every constraint. Result is a lower bound
// within tol.
Rat p_max_oracle(const MeasureQ& mu, double tol = 1e-12);

// sup{eps : mu1 ⪯ mu2^(-,eps)}, within tol; 0 when no positive eps works.
// Requires mu1 ⪯ mu2 to start from.
template <class T>
T sup_eps_down(const BasicMeasure<T>& mu1, const BasicMeasure<T>& mu2, double tol = 1e-9) {
  if (!dominates(mu1, mu2).dominated)
    fail(ErrKind::NotDominated, "sup_eps_down needs mu1 ⪯ mu2");
  auto feasible = [&](const T& eps) {
    return dominates(mu1, apply_channel(mu2, NoiseChannel<T>(eps, T(0)))).dominated;
  };
  return detail::sup_bisect<T>(feasible, scalar_traits<T>::one(), tol);
}

// sup{eps : mu1^(+,eps) ⪯ mu2}, within tol; mirror of sup_eps_down.
template <class T>
T sup_eps_up(const BasicMeasure<T>& mu1, const BasicMeasure<T>& mu2, double tol = 1e-9) {
  if (!dominates(mu1, mu2).dominated)
    fail(ErrKind::NotDominated, "sup_eps_up needs mu1 ⪯ mu2");
  auto feasible = [&](const T& eps) {
    return dominates(apply_channel(mu1, NoiseChannel<T>(T(0), eps)), mu2).dominated;
  };
  return detail::sup_bisect<T>(feasible, scalar_traits<T>::one(), tol);
}

// Finite-ground-set rigidity: rigid iff mu(all-ones) > 0 (equivalently
// p_max > 0). Also reports, as numeric corroboration, the downwards-movability
// radius of (pi_{p_max - tol}, mu): tiny when rigid, large when the critical
// product level is approachable with room to spare.
template <class T>
AnalysisResult<T> rigidity(const BasicMeasure<T>& mu, double tol = 1e-9) {
  AnalysisResult<T> r{scalar_traits<T>::zero(), scalar_traits<T>::zero(), false, T(0)};
  r.tolerance_used = T(tol);
  r.p_max = p_max(mu, tol);
  r.rigid = mu[mu.ground().full_mask()] > 0;
  T probe = r.p_max - T(tol);
  if (probe < 0) probe = scalar_traits<T>::zero();
  r.sup_eps_down = sup_eps_down(product_measure<T>(mu.ground(), probe), mu, tol);
  return r;
}

}  // namespace movelab
