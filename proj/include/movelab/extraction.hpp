#pragma once

#include <string>
#include <vector>

#include "movelab/measure.hpp"

namespace movelab {

enum class ExtractDirection { up, down, both };

inline const char* direction_name(ExtractDirection d) {
  switch (d) {
    case ExtractDirection::up: return "up";
    case ExtractDirection::down: return "down";
    default: return "both";
  }
}

// Push a signed vector through a channel (same per-site sweep as measures;
// needed to verify extractions forward even when entries are negative).
template <class T>
SignedVector<T> apply_channel(const SignedVector<T>& nu, const NoiseChannel<T>& ch) {
  std::vector<T> v = nu.values();
  detail::site_matrix_sweep(v, nu.sites(), 1 - ch.up, ch.down, ch.up, 1 - ch.down);
  return SignedVector<T>(nu.ground(), std::move(v));
}

// Solve nu^(+,eps) = mu for nu: per-site inverse of the up-channel, applied as
// a tensor-factor sweep (the signed Möbius inversion over the subset lattice).
// nu is a genuine measure iff it comes out nonnegative.
template <class T>
SignedVector<T> extract_up(const BasicMeasure<T>& mu, const T& eps) {
  if (eps < 0 || !(eps < 1))
    fail(ErrKind::ParameterOutOfRange, "up-extraction needs 0 <= eps < 1");
  std::vector<T> v = mu.probs();
  T inv = 1 / (1 - eps);
  detail::site_matrix_sweep(v, mu.sites(), inv, T(0), -eps * inv, T(1));
  return SignedVector<T>(mu.ground(), std::move(v));
}

// Solve nu^(-,eps) = mu for nu; the 0↔1 mirror of extract_up (equal to
// complement ∘ extract_up ∘ complement).
template <class T>
SignedVector<T> extract_down(const BasicMeasure<T>& mu, const T& eps) {
  if (eps < 0 || !(eps < 1))
    fail(ErrKind::ParameterOutOfRange, "down-extraction needs 0 <= eps < 1");
  std::vector<T> v = mu.probs();
  T inv = 1 / (1 - eps);
  detail::site_matrix_sweep(v, mu.sites(), T(1), -eps * inv, T(0), inv);
  return SignedVector<T>(mu.ground(), std::move(v));
}

// Solve nu^(-,eps,+,delta) = mu; the per-site 2x2 matrix is invertible only
// when eps + delta < 1.
template <class T>
SignedVector<T> extract_both(const BasicMeasure<T>& mu, const T& eps, const T& delta) {
  if (eps < 0 || delta < 0)
    fail(ErrKind::ParameterOutOfRange, "extraction rates must be nonnegative");
  if (!(eps + delta < 1))
    fail(ErrKind::NonInvertibleChannel, "eps + delta >= 1: channel not invertible");
  std::vector<T> v = mu.probs();
  T det = 1 - eps - delta;
  detail::site_matrix_sweep(v, mu.sites(), (1 - eps) / det, -eps / det, -delta / det,
                            (1 - delta) / det);
  return SignedVector<T>(mu.ground(), std::move(v));
}

template <class T>
SignedVector<T> extract(const BasicMeasure<T>& mu, ExtractDirection dir, const T& eps) {
  switch (dir) {
    case ExtractDirection::up: return extract_up(mu, eps);
    case ExtractDirection::down: return extract_down(mu, eps);
    default: return extract_both(mu, eps, eps);
  }
}

// sup{eps : extraction at eps is a genuine (nonnegative) measure}, within tol.
// Nonnegativity is monotone: feasible at eps2 implies feasible below it, so
// bisection applies; probes decide signs with exact rationals only — float
// entries cannot certify a sign at the boundary.
template <class T>
T max_extract_eps(const BasicMeasure<T>& mu, ExtractDirection dir, double tol = 1e-9) {
  if constexpr (!scalar_traits<T>::exact) {
    fail(ErrKind::NumericallyInvalid,
         "max_extract_eps requires exact mode: float signs near the boundary are meaningless");
  } else {
    if (!(tol > 0)) fail(ErrKind::ParameterOutOfRange, "tol must be positive");
    auto feasible = [&](const T& eps) {
      if (dir == ExtractDirection::both ? !(eps + eps < 1) : !(eps < 1)) return false;
      return extract(mu, dir, eps).is_nonnegative();
    };
    T lo = 0, hi = dir == ExtractDirection::both ? T(1) / 2 : T(1);
    if (feasible(hi)) return hi;
    for (int iter = 0; iter < 80 && to_double(hi - lo) > tol; ++iter) {
      T mid = (lo + hi) / 2;
      if (feasible(mid))
        lo = mid;
      else
        hi = mid;
    }
    if (lo > 0 && !feasible(lo))
      fail(ErrKind::NumericallyInvalid, "extraction feasibility lost its monotone bracket");
    if (feasible(hi))
      fail(ErrKind::NumericallyInvalid, "extraction feasibility lost its monotone bracket");
    return lo;
  }
}

// Largest delta (strict sup) with alpha(1-eps) + alpha*eps*delta +
// (1-alpha)*delta < alpha: if nu is alpha-upwards extractable, thinning by eps
// then thickening by any delta below this keeps the composite up-rate under
// alpha, which is what the movability construction needs.
template <class T>
T max_thickening_delta(const T& alpha, const T& eps) {
  if (!(alpha > 0) || alpha > 1 || !(eps > 0) || !(eps < 1))
    fail(ErrKind::ParameterOutOfRange, "need 0 < alpha <= 1 and 0 < eps < 1");
  return alpha * eps / (1 - alpha * (1 - eps));
}

}  // namespace movelab
