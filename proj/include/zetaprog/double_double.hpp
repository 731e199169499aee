#pragma once

#include <cmath>

namespace zetaprog {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2 (about 106 bits).
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline constexpr double kUnitRoundoff = 0x1p-53;

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD operator+(const DD& a, const DD& b) {
  DD s = two_sum(a.hi, b.hi);
  const DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator*(double a, const DD& b) {
  DD p = two_prod(a, b.hi);
  p.lo += a * b.lo;
  return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, double b) {
  const double q1 = a.hi / b;
  const DD r = a - two_prod(q1, b);
  const double q2 = (r.hi + r.lo) / b;
  return quick_two_sum(q1, q2);
}

inline double to_double(const DD& a) { return a.hi + a.lo; }

inline constexpr DD kTwoPi{6.283185307179586232e+00, 2.449293598294706414e-16};

/// x mod 2pi, in [-pi, pi]. Exact up to the double-double error of x.
inline double reduce_two_pi(const DD& x) {
  const double q = std::nearbyint(x.hi / kTwoPi.hi);
  const DD r = x - q * kTwoPi;
  return r.hi + r.lo;
}

/// Fractional part of a double-double, in [0, 1).
inline double frac(const DD& x) {
  const double f = std::floor(x.hi);
  double r = (x.hi - f) + x.lo;  // x.hi - f is exact
  if (r < 0.0) r += 1.0;
  if (r >= 1.0) r -= 1.0;
  return r;
}

/// Complex number with double-double parts.
struct ComplexDD {
  DD re;
  DD im;
};

inline ComplexDD operator*(const ComplexDD& a, const ComplexDD& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline ComplexDD operator/(const ComplexDD& a, double b) { return {a.re / b, a.im / b}; }

}  // namespace zetaprog
