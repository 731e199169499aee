#include "zetaprog/exact_arith.hpp"

#include <numeric>
#include <string>

#include "zetaprog/errors.hpp"

namespace zetaprog {

namespace {

// bits of k^{e} * 2^{extra}, rounded up
std::uint64_t estimated_bits(long k, long e, std::uint64_t extra) {
  const auto kb = static_cast<std::uint64_t>(mpz_sizeinbase(mpz_class(k).get_mpz_t(), 2));
  return kb * static_cast<std::uint64_t>(e) + extra;
}

void check_budget(long k, long e, std::uint64_t extra, const ExactBudget& budget) {
  if (estimated_bits(k, e, extra) > budget.max_bits) {
    throw BudgetError("intermediate k^" + std::to_string(e) + " exceeds bit budget of " +
                      std::to_string(budget.max_bits) + " bits");
  }
}

}  // namespace

void validate(const PowerFamily& f) {
  if (f.k < 2) throw PreconditionError("k must be >= 2");
  if (f.q < 1) throw PreconditionError("q must be >= 1");
  if (f.p < 1 || f.p > f.q) throw PreconditionError("need 1 <= p <= q");
  if (std::gcd(f.p, f.q) != 1) throw PreconditionError("p and q must be coprime");
  if (f.q >= 2 && is_perfect_power(mpz_class(f.k), static_cast<unsigned long>(f.q))) {
    throw PreconditionError("k = " + std::to_string(f.k) + " is a perfect " + std::to_string(f.q) + "-th power");
  }
}

void validate(const PowerDescriptor& pd) {
  validate(pd.family());
  if (pd.d < 0) throw PreconditionError("shift d must be >= 0");
}

mpz_class ipow(long base, unsigned long exp) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), mpz_class(base).get_mpz_t(), exp);
  return r;
}

mpz_class iroot(const mpz_class& n, unsigned long q) {
  if (n < 0) throw PreconditionError("iroot of a negative number");
  if (q == 0) throw PreconditionError("iroot with q = 0");
  if (q == 1 || n < 2) return n;

  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  mpz_class r = mpz_class(1) << static_cast<mp_bitcnt_t>((bits + q - 1) / q);  // r^q >= 2^bits > n
  mpz_class rpow, y;
  for (;;) {
    // y = ((q-1) r + n / r^{q-1}) / q; strictly decreasing until r = floor(n^{1/q}).
    mpz_pow_ui(rpow.get_mpz_t(), r.get_mpz_t(), q - 1);
    mpz_tdiv_q(y.get_mpz_t(), n.get_mpz_t(), rpow.get_mpz_t());
    y += r * static_cast<unsigned long>(q - 1);
    mpz_tdiv_q_ui(y.get_mpz_t(), y.get_mpz_t(), q);
    if (y >= r) break;
    r.swap(y);
  }
  return r;
}

bool is_perfect_power(const mpz_class& n, unsigned long q) {
  const mpz_class r = iroot(n, q);
  mpz_class back;
  mpz_pow_ui(back.get_mpz_t(), r.get_mpz_t(), q);
  return back == n;
}

mpz_class floor_power(const PowerDescriptor& pd, const ExactBudget& budget) {
  validate(pd);
  const long e = pd.q * pd.d + pd.p;
  check_budget(pd.k, e, 0, budget);
  return iroot(ipow(pd.k, static_cast<unsigned long>(e)), static_cast<unsigned long>(pd.q));
}

FixedInterval frac_power(const PowerDescriptor& pd, unsigned prec_bits, const ExactBudget& budget) {
  validate(pd);
  if (prec_bits < 8) throw PreconditionError("prec_bits must be >= 8");
  const long e = pd.q * pd.d + pd.p;
  const auto q = static_cast<unsigned long>(pd.q);
  const std::uint64_t shift = static_cast<std::uint64_t>(pd.q) * prec_bits;
  check_budget(pd.k, e, shift, budget);

  const mpz_class scaled = ipow(pd.k, static_cast<unsigned long>(e)) << static_cast<mp_bitcnt_t>(shift);
  const mpz_class root = iroot(scaled, q);  // floor(k^{d+p/q} * 2^prec)
  const mpz_class whole = root >> prec_bits;
  const mpz_class frac = root - (whole << prec_bits);

  mpz_class back;
  mpz_pow_ui(back.get_mpz_t(), root.get_mpz_t(), q);
  if (back == scaled) return FixedInterval(mpz_class(frac << 1), prec_bits + 1, 0);
  // True value * 2^prec lies in [root, root + 1).
  return FixedInterval::from_bounds(frac, mpz_class(frac + 1), prec_bits);
}

std::vector<std::int64_t> digit_prefix_counts(long b, long l, long a, long p, long q) {
  validate(PowerFamily{b, p, q});
  if (l < 0) throw PreconditionError("l must be >= 0");
  if (a < 0 || a >= b) throw PreconditionError("digit a must lie in [0, b)");
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(l) + 1);
  std::int64_t c = 0;
  mpz_class digit;
  for (long d = 0; d <= l; ++d) {
    const mpz_class fl = floor_power({b, p, q, d});
    mpz_fdiv_r_ui(digit.get_mpz_t(), fl.get_mpz_t(), static_cast<unsigned long>(b));
    if (digit == a) ++c;
    counts.push_back(c);
  }
  return counts;
}

std::int64_t digit_count(long b, long l, long a, long p, long q) {
  return digit_prefix_counts(b, l, a, p, q).back();
}

std::vector<FixedInterval> frac_prefix_sums(const PowerFamily& f, long l, unsigned prec_bits) {
  validate(f);
  if (l < 0) throw PreconditionError("l must be >= 0");
  std::vector<FixedInterval> out;
  out.reserve(static_cast<std::size_t>(l) + 1);
  FixedInterval acc(0, prec_bits + 1, 0);
  for (long d = 0; d <= l; ++d) {
    acc += frac_power(at_shift(f, d), prec_bits);
    out.push_back(acc);
  }
  return out;
}

FixedInterval frac_sum(const PowerFamily& f, long l, unsigned prec_bits) {
  return frac_prefix_sums(f, l, prec_bits).back();
}

DistanceResult nearest_int_distance(const PowerDescriptor& pd, unsigned prec_bits, unsigned cap_bits) {
  validate(pd);
  unsigned bits = prec_bits;
  for (;;) {
    const FixedInterval dist = distance_to_nearest_integer(frac_power(pd, bits));
    const bool separated = dist.lower_scaled() > 0;
    if (separated || pd.q == 1 || bits >= cap_bits) return {dist, bits, separated};
    bits = std::min(bits * 2, cap_bits);
  }
}

}  // namespace zetaprog
