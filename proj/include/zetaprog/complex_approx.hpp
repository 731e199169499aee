#pragma once

#include <cmath>
#include <complex>

#include "zetaprog/double_double.hpp"

namespace zetaprog {

/// A complex value paired with a certified bound on |computed - true|.
///
/// The bound assumes the platform's libm returns exp/log/sin/cos within one
/// ulp (glibc does); every arithmetic step below adds its own rounding term.
struct ComplexApprox {
  double re = 0.0;
  double im = 0.0;
  double err = 0.0;

  std::complex<double> value() const { return {re, im}; }
  double magnitude() const { return std::hypot(re, im); }
  ComplexApprox conj() const { return {re, -im, err}; }
};

namespace detail {
// Inflate a freshly computed error sum to absorb rounding in the sum itself.
inline double round_up(double e) { return e * (1.0 + 4.0 * kUnitRoundoff); }
}  // namespace detail

inline ComplexApprox from_value(std::complex<double> v, double err) { return {v.real(), v.imag(), err}; }

inline ComplexApprox operator+(const ComplexApprox& a, const ComplexApprox& b) {
  const std::complex<double> v = a.value() + b.value();
  return from_value(v, detail::round_up(a.err + b.err + kUnitRoundoff * (std::abs(v.real()) + std::abs(v.imag()))));
}

inline ComplexApprox operator-(const ComplexApprox& a, const ComplexApprox& b) {
  return a + ComplexApprox{-b.re, -b.im, b.err};
}

inline ComplexApprox operator*(const ComplexApprox& a, const ComplexApprox& b) {
  const std::complex<double> v = a.value() * b.value();
  const double ma = a.magnitude();
  const double mb = b.magnitude();
  // |a b - a' b'| <= |a| eb + |b| ea + ea eb, plus sqrt(5) u |a b| for the product
  const double e = ma * b.err + mb * a.err + a.err * b.err + 3.0 * kUnitRoundoff * ma * mb;
  return from_value(v, detail::round_up(e));
}

inline ComplexApprox scaled(const ComplexApprox& a, double c) {
  return {a.re * c, a.im * c, detail::round_up(std::abs(c) * a.err + 2.0 * kUnitRoundoff * std::abs(c) * a.magnitude())};
}

}  // namespace zetaprog
