#pragma once

#include <gmpxx.h>

#include <string>

namespace zetaprog {

/// Dyadic fixed-point value with a certified radius.
///
/// Represents the closed interval
///   [(mantissa - err_ulp) * 2^-frac_bits, (mantissa + err_ulp) * 2^-frac_bits].
/// Every operation either keeps the radius or widens it; nothing narrows it.
class FixedInterval {
 public:
  FixedInterval() = default;
  FixedInterval(mpz_class mantissa, unsigned frac_bits, mpz_class err_ulp = 0);

  static FixedInterval exact_integer(const mpz_class& v, unsigned frac_bits = 0);
  /// Smallest centered interval covering [lo, hi] * 2^-bits (one extra bit).
  static FixedInterval from_bounds(const mpz_class& lo, const mpz_class& hi, unsigned bits);
  /// Outward-rounded enclosure of num/den at `bits` fractional bits.
  static FixedInterval from_rational(const mpz_class& num, const mpz_class& den, unsigned bits);

  const mpz_class& mantissa() const { return mantissa_; }
  unsigned frac_bits() const { return frac_bits_; }
  const mpz_class& err_ulp() const { return err_; }
  bool is_exact() const { return err_ == 0; }

  /// Lower/upper end as integers scaled by 2^frac_bits.
  mpz_class lower_scaled() const { return mantissa_ - err_; }
  mpz_class upper_scaled() const { return mantissa_ + err_; }

  double midpoint() const;
  /// Radius rounded up to a double.
  double radius() const;
  /// Endpoints rounded outward to doubles.
  double lower_bound() const;
  double upper_bound() const;

  bool contains(const mpz_class& integer) const;
  /// True iff the interval lies inside [0, 1].
  bool within_unit() const;
  /// True iff the interval contains no integer.
  bool excludes_integers() const;

  /// Re-express at `bits` fractional bits; shrinking bits rounds outward.
  FixedInterval rescaled(unsigned bits) const;
  FixedInterval widened(const mpz_class& extra_ulp) const;

  FixedInterval operator-() const;
  FixedInterval& operator+=(const FixedInterval& rhs);
  FixedInterval& operator-=(const FixedInterval& rhs);
  FixedInterval& operator*=(const mpz_class& c);

  std::string to_string(int digits = 20) const;

 private:
  mpz_class mantissa_ = 0;
  unsigned frac_bits_ = 0;
  mpz_class err_ = 0;
};

FixedInterval operator+(FixedInterval a, const FixedInterval& b);
FixedInterval operator-(FixedInterval a, const FixedInterval& b);
FixedInterval operator*(FixedInterval a, const mpz_class& c);

/// 1 - x, exactly (no widening).
FixedInterval one_minus(const FixedInterval& x);
/// min(x, 1 - x) for x within [0, 1]; encloses the image of the whole interval.
FixedInterval distance_to_nearest_integer(const FixedInterval& frac);

}  // namespace zetaprog
