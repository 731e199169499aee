#include "zetaprog/fixed_interval.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <utility>

namespace zetaprog {

namespace {

double scaled_to_double(const mpz_class& v, unsigned bits, mpfr_rnd_t rnd) {
  const auto prec = static_cast<mpfr_prec_t>(std::max<std::size_t>(64, mpz_sizeinbase(v.get_mpz_t(), 2) + 2));
  mpfr_t x;
  mpfr_init2(x, prec);
  mpfr_set_z_2exp(x, v.get_mpz_t(), -static_cast<long>(bits), MPFR_RNDN);  // exact at this precision
  const double d = mpfr_get_d(x, rnd);
  mpfr_clear(x);
  return d;
}

mpz_class cdiv_2exp(const mpz_class& v, unsigned shift) {
  mpz_class r;
  mpz_cdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), shift);
  return r;
}

mpz_class fdiv_2exp(const mpz_class& v, unsigned shift) {
  mpz_class r;
  mpz_fdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), shift);
  return r;
}

}  // namespace

FixedInterval::FixedInterval(mpz_class mantissa, unsigned frac_bits, mpz_class err_ulp)
    : mantissa_(std::move(mantissa)), frac_bits_(frac_bits), err_(std::move(err_ulp)) {
  if (err_ < 0) err_ = -err_;
}

FixedInterval FixedInterval::exact_integer(const mpz_class& v, unsigned frac_bits) {
  return FixedInterval(mpz_class(v << frac_bits), frac_bits, 0);
}

FixedInterval FixedInterval::from_bounds(const mpz_class& lo, const mpz_class& hi, unsigned bits) {
  if (lo == hi) return FixedInterval(lo, bits, 0);
  const mpz_class a = std::min(lo, hi);
  const mpz_class b = std::max(lo, hi);
  return FixedInterval(mpz_class(a + b), bits + 1, mpz_class(b - a));
}

FixedInterval FixedInterval::from_rational(const mpz_class& num, const mpz_class& den, unsigned bits) {
  mpz_class scaled = num << bits;
  mpz_class lo, hi;
  mpz_fdiv_q(lo.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  mpz_cdiv_q(hi.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  return from_bounds(lo, hi, bits);
}

double FixedInterval::midpoint() const { return scaled_to_double(mantissa_, frac_bits_, MPFR_RNDN); }
double FixedInterval::radius() const { return scaled_to_double(err_, frac_bits_, MPFR_RNDU); }
double FixedInterval::lower_bound() const { return scaled_to_double(lower_scaled(), frac_bits_, MPFR_RNDD); }
double FixedInterval::upper_bound() const { return scaled_to_double(upper_scaled(), frac_bits_, MPFR_RNDU); }

bool FixedInterval::contains(const mpz_class& integer) const {
  const mpz_class v = integer << frac_bits_;
  return lower_scaled() <= v && v <= upper_scaled();
}

bool FixedInterval::within_unit() const {
  const mpz_class one = mpz_class(1) << frac_bits_;
  return lower_scaled() >= 0 && upper_scaled() <= one;
}

bool FixedInterval::excludes_integers() const {
  const mpz_class lo_floor = fdiv_2exp(lower_scaled(), frac_bits_);
  const mpz_class hi_floor = fdiv_2exp(upper_scaled(), frac_bits_);
  // No integer in [lo, hi] iff both ends share a floor and lo is not itself an integer.
  return lo_floor == hi_floor && (lo_floor << frac_bits_) != lower_scaled();
}

FixedInterval FixedInterval::rescaled(unsigned bits) const {
  if (bits >= frac_bits_) {
    const unsigned shift = bits - frac_bits_;
    return FixedInterval(mpz_class(mantissa_ << shift), bits, mpz_class(err_ << shift));
  }
  const unsigned shift = frac_bits_ - bits;
  const mpz_class lo = fdiv_2exp(lower_scaled(), shift);
  const mpz_class hi = cdiv_2exp(upper_scaled(), shift);
  mpz_class mid;
  mpz_class sum = lo + hi;
  mpz_fdiv_q_2exp(mid.get_mpz_t(), sum.get_mpz_t(), 1);
  return FixedInterval(mid, bits, std::max(mpz_class(mid - lo), mpz_class(hi - mid)));
}

FixedInterval FixedInterval::widened(const mpz_class& extra_ulp) const {
  return FixedInterval(mantissa_, frac_bits_, mpz_class(err_ + abs(extra_ulp)));
}

FixedInterval FixedInterval::operator-() const { return FixedInterval(mpz_class(-mantissa_), frac_bits_, err_); }

FixedInterval& FixedInterval::operator+=(const FixedInterval& rhs) {
  const unsigned bits = std::max(frac_bits_, rhs.frac_bits_);
  if (bits != frac_bits_) *this = rescaled(bits);
  if (bits != rhs.frac_bits_) {
    const FixedInterval r = rhs.rescaled(bits);
    mantissa_ += r.mantissa_;
    err_ += r.err_;
  } else {
    mantissa_ += rhs.mantissa_;
    err_ += rhs.err_;
  }
  return *this;
}

FixedInterval& FixedInterval::operator-=(const FixedInterval& rhs) { return *this += -rhs; }

FixedInterval& FixedInterval::operator*=(const mpz_class& c) {
  mantissa_ *= c;
  err_ *= abs(c);
  return *this;
}

std::string FixedInterval::to_string(int digits) const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.*g +/- %.3g", digits, midpoint(), radius());
  return buf;
}

FixedInterval operator+(FixedInterval a, const FixedInterval& b) { return a += b; }
FixedInterval operator-(FixedInterval a, const FixedInterval& b) { return a -= b; }
FixedInterval operator*(FixedInterval a, const mpz_class& c) { return a *= c; }

FixedInterval one_minus(const FixedInterval& x) {
  const mpz_class one = mpz_class(1) << x.frac_bits();
  return FixedInterval(mpz_class(one - x.mantissa()), x.frac_bits(), x.err_ulp());
}

FixedInterval distance_to_nearest_integer(const FixedInterval& frac) {
  // Work one bit finer so that 1/2 is representable for any frac_bits.
  const FixedInterval f = frac.rescaled(frac.frac_bits() + 1);
  const unsigned bits = f.frac_bits();
  const mpz_class one = mpz_class(1) << bits;
  const mpz_class half = mpz_class(1) << (bits - 1);
  // The enclosed quantity is a fractional part, so clamping to [0, 1] loses nothing.
  const mpz_class a = std::max(f.lower_scaled(), mpz_class(0));
  const mpz_class b = std::min(f.upper_scaled(), one);
  if (f.is_exact()) {
    return FixedInterval(std::min(a, mpz_class(one - a)), bits, 0);
  }
  if (b <= half) return FixedInterval::from_bounds(a, b, bits);
  if (a >= half) return FixedInterval::from_bounds(mpz_class(one - b), mpz_class(one - a), bits);
  return FixedInterval::from_bounds(std::min(a, mpz_class(one - b)), half, bits);
}

}  // namespace zetaprog
