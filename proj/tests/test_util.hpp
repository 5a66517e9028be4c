#pragma once

#include <random>
#include <vector>

#include "movelab/measure.hpp"

namespace testutil {

// Random exact measure with integer weights over a common denominator, so the
// total is exactly 1. zero_frac forces roughly that fraction of entries to 0.
inline movelab::MeasureQ random_measure_q(int n, std::mt19937_64& rng, double zero_frac = 0.0) {
  const std::size_t size = std::size_t{1} << n;
  std::uniform_int_distribution<long> weight(1, 999);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<long> w(size);
  long total = 0;
  while (total == 0)
    for (std::size_t i = 0; i < size; ++i) {
      w[i] = coin(rng) < zero_frac ? 0 : weight(rng);
      total += w[i];
    }
  std::vector<movelab::Rat> probs(size);
  for (std::size_t i = 0; i < size; ++i) probs[i] = movelab::Rat(w[i]) / movelab::Rat(total);
  return movelab::MeasureQ(movelab::GroundSet(n), std::move(probs));
}

inline movelab::MeasureD to_float(const movelab::MeasureQ& mu) {
  std::vector<double> probs(mu.size());
  double sum = 0;
  for (movelab::Config c = 0; c < mu.size(); ++c) {
    probs[c] = movelab::to_double(mu[c]);
    sum += probs[c];
  }
  for (double& p : probs) p /= sum;
  return movelab::MeasureD(mu.ground(), std::move(probs));
}

// Random rational in {1/d, ..., (d-1)/d}.
inline movelab::Rat random_rat(std::mt19937_64& rng, long d = 20) {
  std::uniform_int_distribution<long> num(1, d - 1);
  return movelab::Rat(num(rng)) / movelab::Rat(d);
}

}  // namespace testutil
