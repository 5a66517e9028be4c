#include "movelab/determinantal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace movelab {

namespace {

constexpr int kMaxFourier = 4096;

std::vector<double> to_doubles(const std::vector<Rat>& cs) {
  std::vector<double> out(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) out[i] = to_double(cs[i]);
  return out;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

Rat horner_exact(const std::vector<Rat>& c, const Rat& x) {
  Rat v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

void trim(std::vector<Rat>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// j-th derivative of the polynomial with coefficients c, evaluated at x.
double derivative_at(const std::vector<double>& c, int j, double x) {
  double v = 0;
  for (std::size_t m = c.size(); m-- > static_cast<std::size_t>(j);) {
    double fall = 1;
    for (int t = 0; t < j; ++t) fall *= static_cast<double>(m - static_cast<std::size_t>(t));
    v = v * x + c[m] * fall;
  }
  return v;
}

// Real-coefficient roots via the companion matrix of the monic polynomial.
std::vector<std::complex<double>> poly_roots(std::vector<double> c) {
  while (!c.empty() && std::abs(c.back()) < 1e-300) c.pop_back();
  if (c.size() <= 1) return {};
  const int d = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(d)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

// ∫ log|x - r| dx antiderivative, continuous through the singularity.
double ilog(double t) { return t == 0 ? 0.0 : t * std::log(std::abs(t)) - t; }

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = (a + b) / 2;
  double lm = (a + m) / 2, rm = (m + b) / 2;
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
  if (!(b > a)) return 0;
  double fa = g(a), fb = g(b), fm = g((a + b) / 2);
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double KernelPiece::eval(double x) const {
  double v = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + to_double(coeffs[i]);
  return v;
}

KernelFunction::KernelFunction(std::vector<KernelPiece> pieces) {
  for (KernelPiece& p : pieces) {
    if (p.lo < 0 || p.hi > 1) fail(ErrKind::ParameterOutOfRange, "kernel pieces live in [0,1]");
    trim(p.coeffs);
    if (p.lo >= p.hi) continue;  // empty piece
    pieces_.push_back(std::move(p));
  }
  std::sort(pieces_.begin(), pieces_.end(),
            [](const KernelPiece& a, const KernelPiece& b) { return a.lo < b.lo; });
  Rat cursor = 0;
  for (const KernelPiece& p : pieces_) {
    if (p.lo < cursor) fail(ErrKind::ParameterOutOfRange, "kernel pieces overlap");
    if (p.lo > cursor) has_gap_ = true;
    cursor = p.hi;
  }
  if (cursor < 1) has_gap_ = true;

  // Range validation: exact at endpoints, dense float grid inside.
  for (const KernelPiece& p : pieces_) {
    for (const Rat& x : {p.lo, p.hi}) {
      Rat v = horner_exact(p.coeffs, x);
      if (v < 0 || v > 1)
        fail(ErrKind::ParameterOutOfRange, "kernel leaves [0,1] at a piece endpoint");
    }
    std::vector<double> cd = to_doubles(p.coeffs);
    double lo = to_double(p.lo), hi = to_double(p.hi);
    for (int i = 1; i < 1024; ++i) {
      double v = horner(cd, lo + (hi - lo) * i / 1024);
      if (v < -1e-9 || v > 1 + 1e-9)
        fail(ErrKind::ParameterOutOfRange, "kernel leaves [0,1] inside a piece");
    }
  }
}

KernelFunction KernelFunction::constant(const Rat& p) {
  return KernelFunction({KernelPiece{Rat(0), Rat(1), {p}}});
}

double KernelFunction::eval(double x) const {
  for (const KernelPiece& p : pieces_)
    if (to_double(p.lo) <= x && x <= to_double(p.hi)) return p.eval(x);
  return 0;
}

KernelFunction KernelFunction::scaled(const Rat& factor) const {
  if (factor < 0 || factor > 1)
    fail(ErrKind::ParameterOutOfRange, "kernel scaling factor outside [0,1]");
  std::vector<KernelPiece> ps = pieces_;
  for (KernelPiece& p : ps)
    for (Rat& c : p.coeffs) c *= factor;
  return KernelFunction(std::move(ps));
}

KernelFunction KernelFunction::parse(const std::string& spec) {
  std::vector<KernelPiece> pieces;
  std::size_t pos = 0;
  auto parse_rat = [](const std::string& s) { return rat_from_string(s); };
  while (pos < spec.size()) {
    std::size_t end = spec.find(';', pos);
    if (end == std::string::npos) end = spec.size();
    std::string term = spec.substr(pos, end - pos);
    pos = end + 1;
    if (term.empty()) continue;

    Rat dom_lo = 0, dom_hi = 1;
    if (term.front() == '[') {
      std::size_t close = term.find(']');
      std::size_t comma = term.find(',');
      if (close == std::string::npos || comma == std::string::npos || comma > close)
        fail(ErrKind::ParseError, "bad domain prefix in kernel term '" + term + "'");
      dom_lo = parse_rat(term.substr(1, comma - 1));
      dom_hi = parse_rat(term.substr(comma + 1, close - comma - 1));
      term = term.substr(close + 1);
    }

    auto split = [](const std::string& s, char sep) {
      std::vector<std::string> out;
      std::size_t p = 0;
      while (true) {
        std::size_t q = s.find(sep, p);
        if (q == std::string::npos) {
          out.push_back(s.substr(p));
          break;
        }
        out.push_back(s.substr(p, q - p));
        p = q + 1;
      }
      return out;
    };

    std::vector<std::string> parts = split(term, ':');
    if (parts.size() == 2 && parts[0] == "const") {
      pieces.push_back({dom_lo, dom_hi, {parse_rat(parts[1])}});
    } else if (parts.size() == 3 && parts[0] == "indicator") {
      std::vector<std::string> ab = split(parts[1], ',');
      if (ab.size() != 2) fail(ErrKind::ParseError, "indicator needs 'a,b'");
      Rat a = parse_rat(ab[0]), b = parse_rat(ab[1]);
      Rat lo = std::max(a, dom_lo), hi = std::min(b, dom_hi);
      pieces.push_back({lo, hi, {parse_rat(parts[2])}});
    } else if (parts.size() == 2 && parts[0] == "poly") {
      std::vector<Rat> coeffs;
      for (const std::string& c : split(parts[1], ',')) coeffs.push_back(parse_rat(c));
      pieces.push_back({dom_lo, dom_hi, std::move(coeffs)});
    } else {
      fail(ErrKind::ParseError, "unknown kernel term '" + term + "'");
    }
  }
  if (pieces.empty()) fail(ErrKind::ParseError, "empty kernel spec");
  return KernelFunction(std::move(pieces));
}

std::complex<double> fourier_coefficient(const KernelFunction& f, int k) {
  if (k < -kMaxFourier || k > kMaxFourier)
    fail(ErrKind::ParameterOutOfRange, "Fourier index capped at |k| <= 4096");
  if (k == 0) {
    Rat acc = 0;  // plain polynomial integral, exact
    for (const KernelPiece& p : f.pieces()) {
      Rat lo_pow = p.lo, hi_pow = p.hi;
      for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
        acc += p.coeffs[j] * (hi_pow - lo_pow) / static_cast<long>(j + 1);
        lo_pow *= p.lo;
        hi_pow *= p.hi;
      }
    }
    return {to_double(acc), 0.0};
  }
  const double omega = 2 * std::numbers::pi * k;
  const std::complex<double> i_unit(0, 1);
  std::complex<double> acc = 0;
  for (const KernelPiece& p : f.pieces()) {
    std::vector<double> cd = to_doubles(p.coeffs);
    if (cd.empty()) continue;
    // antiderivative of P(x) e^{-iωx} is e^{-iωx} Σ_j c_j P^{(j)}(x),
    // c_j = (i/ω)(-i/ω)^j
    auto endpoint = [&](double x) {
      std::complex<double> coef = i_unit / omega;
      std::complex<double> s = 0;
      for (int j = 0; j < static_cast<int>(cd.size()); ++j) {
        s += coef * derivative_at(cd, j, x);
        coef *= -i_unit / omega;
      }
      return std::exp(-i_unit * omega * x) * s;
    };
    acc += endpoint(to_double(p.hi)) - endpoint(to_double(p.lo));
  }
  return acc;
}

namespace {

double toeplitz_det(const std::vector<std::complex<double>>& coeff_by_diff,
                    const std::vector<long long>& pts, long long base) {
  const int k = static_cast<int>(pts.size());
  if (k == 0) return 1.0;
  Eigen::MatrixXcd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      m(i, j) = coeff_by_diff[static_cast<std::size_t>(pts[static_cast<std::size_t>(j)] -
                                                       pts[static_cast<std::size_t>(i)] + base)];
  std::complex<double> det = m.partialPivLu().determinant();
  if (std::abs(det.imag()) > 1e-9)
    fail(ErrKind::NumericallyInvalid, "ones-probability determinant is not real");
  double r = det.real();
  if (r < -1e-9 || r > 1 + 1e-9)
    fail(ErrKind::NumericallyInvalid, "ones-probability determinant outside [0,1]");
  return std::clamp(r, 0.0, 1.0);
}

}  // namespace

double ones_probability(const KernelFunction& f, const std::vector<long long>& window) {
  if (window.empty()) return 1.0;
  if (static_cast<int>(window.size()) > limits().window_points)
    fail(ErrKind::SizeExceeded,
         "window capped at " + std::to_string(limits().window_points) + " points");
  std::vector<long long> pts = window;
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    fail(ErrKind::DuplicateConfiguration, "window points must be distinct");
  long long span = pts.back() - pts.front();
  if (span > kMaxFourier) fail(ErrKind::SizeExceeded, "window span exceeds the Fourier cap");
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(2 * span + 1));
  for (long long d = -span; d <= span; ++d)
    coeff[static_cast<std::size_t>(d + span)] = fourier_coefficient(f, static_cast<int>(d));
  return toeplitz_det(coeff, pts, span);
}

MeasureD window_measure(const KernelFunction& f, int n) {
  if (n < 1 || n > limits().window_points)
    fail(ErrKind::SizeExceeded,
         "window capped at " + std::to_string(limits().window_points) + " points");
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d)
    coeff[static_cast<std::size_t>(d + n - 1)] = fourier_coefficient(f, d);

  const std::size_t space = std::size_t{1} << n;
  std::vector<double> v(space);
  for (std::size_t mask = 0; mask < space; ++mask) {
    std::vector<long long> pts;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) pts.push_back(i);
    v[mask] = toeplitz_det(coeff, pts, n - 1);
  }

  // Inclusion-exclusion: P(exactly mask) = Σ_{C ⊇ mask} (-1)^{|C\mask|} P(all of C).
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t m = 0; m < space; ++m)
      if (!(m & bit)) v[m] -= v[m | bit];
  }

  double sum = 0;
  for (double& x : v) {
    if (x < -1e-9)
      fail(ErrKind::NumericallyInvalid, "window entry negative beyond rounding tolerance");
    if (x < 0) x = 0;
    sum += x;
  }
  if (std::abs(sum - 1) > 1e-9)
    fail(ErrKind::NumericallyInvalid, "window entries sum off by more than 1e-9");
  for (double& x : v) x /= sum;
  return MeasureD(GroundSet(n), std::move(v));
}

double geometric_mean(const KernelFunction& f) {
  if (f.has_gap()) return 0;  // f = 0 on positive measure
  double integral = 0;
  for (const KernelPiece& p : f.pieces()) {
    std::vector<double> cd = to_doubles(p.coeffs);
    if (cd.empty()) return 0;  // zero piece
    double lo = to_double(p.lo), hi = to_double(p.hi);
    // log|P| integrates in closed form through the roots of P.
    integral += (hi - lo) * std::log(std::abs(cd.back()));
    for (const std::complex<double>& r : poly_roots(cd)) {
      if (std::abs(r.imag()) < 1e-10) {
        integral += ilog(hi - r.real()) - ilog(lo - r.real());
      } else if (r.imag() > 0) {  // each conjugate pair handled once
        double a = r.real(), b = r.imag();
        auto F = [&](double x) {
          double t = x - a;
          return t * std::log(t * t + b * b) - 2 * t + 2 * b * std::atan(t / b);
        };
        integral += F(hi) - F(lo);
      }
    }
  }
  return std::exp(integral);
}

double harmonic_mean(const KernelFunction& f) {
  if (f.has_gap()) return 0;  // 1/f blows up on the gap
  double total = 0;
  for (const KernelPiece& p : f.pieces()) {
    std::vector<double> cd = to_doubles(p.coeffs);
    if (cd.empty()) return 0;
    double lo = to_double(p.lo), hi = to_double(p.hi);
    for (const std::complex<double>& r : poly_roots(cd))
      if (std::abs(r.imag()) < 1e-9 && r.real() >= lo - 1e-12 && r.real() <= hi + 1e-12)
        return 0;  // 1/f has a non-integrable singularity
    total += integrate([&](double x) { return 1.0 / horner(cd, x); }, lo, hi, 1e-10);
  }
  return total > 0 ? 1.0 / total : 0;
}

}  // namespace movelab
