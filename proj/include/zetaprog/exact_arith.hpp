#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "zetaprog/fixed_interval.hpp"

namespace zetaprog {

/// The real number k^{p/q}; the family shared by every shift d.
struct PowerFamily {
  long k = 2;
  long p = 1;
  long q = 2;
};

/// The real number k^{d + p/q}.
struct PowerDescriptor {
  long k = 2;
  long p = 1;
  long q = 2;
  long d = 0;

  PowerFamily family() const { return {k, p, q}; }
};

inline PowerDescriptor at_shift(const PowerFamily& f, long d) { return {f.k, f.p, f.q, d}; }

/// Guard on intermediate integer sizes (bits of k^{qd+p} * 2^{q*prec}).
struct ExactBudget {
  std::uint64_t max_bits = 100'000'000;
};

inline constexpr unsigned kDefaultPrecBits = 128;
inline constexpr unsigned kPrecCapBits = 4096;

/// Throws PreconditionError unless 1 <= p <= q, gcd(p, q) = 1, k >= 2 and,
/// when q >= 2, k is not a perfect q-th power.
void validate(const PowerFamily& f);
void validate(const PowerDescriptor& pd);

/// floor(n^{1/q}) by integer Newton iteration descending from 2^ceil(bits(n)/q).
mpz_class iroot(const mpz_class& n, unsigned long q);
bool is_perfect_power(const mpz_class& n, unsigned long q);
mpz_class ipow(long base, unsigned long exp);

/// floor(k^{d+p/q}) = iroot(k^{qd+p}, q).
mpz_class floor_power(const PowerDescriptor& pd, const ExactBudget& budget = {});

/// {k^{d+p/q}} enclosed in an interval of width at most 2^-prec_bits.
/// Integer powers (q = 1) give the exact zero interval.
FixedInterval frac_power(const PowerDescriptor& pd, unsigned prec_bits = kDefaultPrecBits,
                         const ExactBudget& budget = {});

/// #{0 <= d <= l : floor(b^{d+p/q}) = a (mod b)}.
std::int64_t digit_count(long b, long l, long a, long p, long q);
/// Running counts: element d is the count over [0, d].
std::vector<std::int64_t> digit_prefix_counts(long b, long l, long a, long p, long q);

/// A(l) = sum_{0<=d<=l} {k^{d+p/q}}; err_ulp <= l + 1.
FixedInterval frac_sum(const PowerFamily& f, long l, unsigned prec_bits = kDefaultPrecBits);
/// A(0), A(1), ..., A(l).
std::vector<FixedInterval> frac_prefix_sums(const PowerFamily& f, long l,
                                            unsigned prec_bits = kDefaultPrecBits);

struct DistanceResult {
  FixedInterval value;     // encloses ||k^{d+p/q}||
  unsigned prec_bits = 0;  // precision that produced `value`
  bool separated = false;  // lower end > 0, i.e. certified nonzero
};

/// ||k^{d+p/q}|| with adaptive precision doubling (up to cap_bits) until the
/// enclosure is bounded away from zero. Integer powers return exact zero.
DistanceResult nearest_int_distance(const PowerDescriptor& pd, unsigned prec_bits = kDefaultPrecBits,
                                    unsigned cap_bits = kPrecCapBits);

}  // namespace zetaprog
