#pragma once

#include <complex>
#include <string>
#include <vector>

#include "movelab/measure.hpp"
#include "movelab/rational.hpp"

namespace movelab {

// One polynomial piece of a kernel function, valid on [lo, hi] ⊆ [0,1].
struct KernelPiece {
  Rat lo, hi;
  std::vector<Rat> coeffs;  // ascending powers

  double eval(double x) const;
};

// Piecewise-polynomial kernel [0,1] → [0,1]. Pieces may leave gaps, which are
// implicitly zero; overlaps are rejected, and 0 ≤ f ≤ 1 is validated at exact
// endpoints plus a dense interior grid.
class KernelFunction {
 public:
  explicit KernelFunction(std::vector<KernelPiece> pieces);

  static KernelFunction constant(const Rat& p);
  // CLI grammar: terms joined by ';', each an optional '[lo,hi]' domain prefix
  // followed by 'const:p' | 'indicator:a,b:height' | 'poly:c0,c1,...'.
  static KernelFunction parse(const std::string& spec);

  const std::vector<KernelPiece>& pieces() const { return pieces_; }
  bool has_gap() const { return has_gap_; }  // positive-length zero region
  double eval(double x) const;
  KernelFunction scaled(const Rat& factor) const;  // factor * f, 0 ≤ factor ≤ 1

 private:
  std::vector<KernelPiece> pieces_;  // sorted, non-overlapping, positive length
  bool has_gap_ = false;
};

// ∫₀¹ f(x) e^{-2πikx} dx by closed-form piecewise integration. |k| ≤ 4096.
std::complex<double> fourier_coefficient(const KernelFunction& f, int k);

// Probability that a determinantal process with kernel f is 1 on every window
// point: det of the Toeplitz matrix [f̂(e_j - e_i)]. Window points distinct,
// at most 12 of them.
double ones_probability(const KernelFunction& f, const std::vector<long long>& window);

// Whole measure on the contiguous window {0,…,n-1} via inclusion-exclusion
// over the 2^n all-ones probabilities. Float mode by construction.
MeasureD window_measure(const KernelFunction& f, int n);

// exp ∫ log f and (∫ 1/f)^{-1}; both 0 when the integral diverges.
double geometric_mean(const KernelFunction& f);
double harmonic_mean(const KernelFunction& f);

}  // namespace movelab
