#include "zetaprog/dirichlet_h.hpp"

#include <string>

namespace zetaprog {

namespace {

// {X / K} * 2^prec enclosed, given root = floor(X * 2^prec), whole = floor(X).
FixedInterval scaled_fraction(const mpz_class& root, bool exact_root, const mpz_class& whole,
                              const mpz_class& K, unsigned prec) {
  mpz_class lo, hi, base;
  mpz_fdiv_q(lo.get_mpz_t(), root.get_mpz_t(), K.get_mpz_t());
  if (exact_root) {
    mpz_cdiv_q(hi.get_mpz_t(), root.get_mpz_t(), K.get_mpz_t());
  } else {
    const mpz_class upper = root + 1;
    mpz_cdiv_q(hi.get_mpz_t(), upper.get_mpz_t(), K.get_mpz_t());
  }
  mpz_fdiv_q(base.get_mpz_t(), whole.get_mpz_t(), K.get_mpz_t());
  base <<= prec;
  return FixedInterval::from_bounds(mpz_class(lo - base), mpz_class(hi - base), prec);
}

// sum_{j <= J} b_k(j)
mpz_class block_sum_b(const mpz_class& J, long k) {
  mpz_class multiples;
  mpz_fdiv_q_ui(multiples.get_mpz_t(), J.get_mpz_t(), static_cast<unsigned long>(k));
  return J - multiples * k;
}

}  // namespace

void validate(const ConvolutionParams& cp) {
  if (cp.k < 2) throw PreconditionError("k must be >= 2");
  if (cp.q < 1) throw PreconditionError("q must be >= 1");
  if (cp.q >= 2 && is_perfect_power(mpz_class(cp.k), static_cast<unsigned long>(cp.q))) {
    throw PreconditionError("k is a perfect q-th power");
  }
}

std::int64_t coeff_h(std::uint64_t n, const ConvolutionParams& cp) {
  validate(cp);
  if (n == 0) throw PreconditionError("h(n) needs n >= 1");
  const auto q = static_cast<unsigned long>(cp.q);
  const mpz_class step = ipow(cp.k, q);
  mpz_class m(static_cast<unsigned long>(n));
  std::int64_t h = 0;
  for (;;) {
    const mpz_class j = iroot(m, q);
    mpz_class jq;
    mpz_pow_ui(jq.get_mpz_t(), j.get_mpz_t(), q);
    if (jq == m) h += coeff_b(j, cp.k);
    if (!mpz_divisible_p(m.get_mpz_t(), step.get_mpz_t())) break;
    mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), step.get_mpz_t());
  }
  return h;
}

mpz_class prefix_h(const mpz_class& x, const ConvolutionParams& cp) {
  validate(cp);
  if (x < 1) throw PreconditionError("prefix_h needs x >= 1");
  // sum_{d : k^{qd} <= x} sum_{j <= floor(x^{1/q} / k^d)} b(j)
  const mpz_class root = iroot(x, static_cast<unsigned long>(cp.q));
  mpz_class J = root;
  mpz_class total = 0;
  while (J >= 1) {
    total += block_sum_b(J, cp.k);
    mpz_fdiv_q_ui(J.get_mpz_t(), J.get_mpz_t(), static_cast<unsigned long>(cp.k));
  }
  return total;
}

FixedInterval key_sum_rhs(const mpz_class& x, const ConvolutionParams& cp, unsigned prec_bits) {
  validate(cp);
  if (x < 2) throw PreconditionError("key_sum_rhs needs x >= 2");
  const auto q = static_cast<unsigned long>(cp.q);
  const mpz_class scaled = x << static_cast<mp_bitcnt_t>(q * prec_bits);
  const mpz_class root = iroot(scaled, q);
  mpz_class back;
  mpz_pow_ui(back.get_mpz_t(), root.get_mpz_t(), q);
  const bool exact = back == scaled;
  const mpz_class whole = root >> prec_bits;  // floor(x^{1/q})

  FixedInterval total(0, prec_bits + 1, 0);
  mpz_class K = 1;
  FixedInterval current = scaled_fraction(root, exact, whole, K, prec_bits);
  // d runs while k^d <= floor(x^{1/q}), i.e. k^{qd} <= x.
  while (K <= whole) {
    const mpz_class K_next = K * cp.k;
    FixedInterval next = scaled_fraction(root, exact, whole, K_next, prec_bits);
    total -= current;
    total += next * mpz_class(cp.k);
    current = std::move(next);
    K = K_next;
  }
  return total;
}

KeySumReport verify_key_sum(const mpz_class& x, const ConvolutionParams& cp, unsigned prec_bits,
                            unsigned cap_bits) {
  KeySumReport rep;
  rep.x = x;
  rep.lhs = prefix_h(x, cp);
  unsigned bits = prec_bits;
  for (;;) {
    rep.rhs = key_sum_rhs(x, cp, bits);
    rep.prec_bits = bits;
    // Decisive once the enclosure is narrower than one unit (radius < 1/2).
    const bool narrow = (rep.rhs.err_ulp() << 1) < (mpz_class(1) << rep.rhs.frac_bits());
    if (narrow) {
      rep.verdict = rep.rhs.contains(rep.lhs) ? Verdict::pass : Verdict::fail;
      return rep;
    }
    if (bits >= cap_bits) {
      rep.verdict = rep.rhs.contains(rep.lhs) ? Verdict::undecided : Verdict::fail;
      return rep;
    }
    bits = std::min(bits * 2, cap_bits);
  }
}

namespace {

NumberOfOnesReport assemble_numberof1(long l, const PowerFamily& f, FixedInterval a_l) {
  NumberOfOnesReport rep;
  rep.l = l;
  rep.prefix = prefix_h(ipow(f.k, static_cast<unsigned long>(f.q * l + f.p)), {f.k, f.q});
  rep.frac_sum = std::move(a_l);
  rep.diff = FixedInterval::exact_integer(rep.prefix, rep.frac_sum.frac_bits()) -
             rep.frac_sum * mpz_class(f.k - 1);
  rep.bound = f.k;
  const mpz_class limit = mpz_class(f.k) << rep.diff.frac_bits();
  const bool inside = rep.diff.upper_scaled() <= limit && rep.diff.lower_scaled() >= -limit;
  const bool outside = rep.diff.lower_scaled() > limit || rep.diff.upper_scaled() < -limit;
  rep.verdict = inside ? Verdict::pass : (outside ? Verdict::fail : Verdict::undecided);
  return rep;
}

BinaryExpansionReport assemble_binary(long l, FixedInterval sum, std::int64_t ones) {
  BinaryExpansionReport rep;
  rep.l = l;
  rep.frac_sum = std::move(sum);
  rep.ones = ones;
  rep.diff = rep.frac_sum - FixedInterval::exact_integer(mpz_class(static_cast<long>(ones)), rep.frac_sum.frac_bits());
  const mpz_class limit = mpz_class(2) << rep.diff.frac_bits();
  const bool inside = rep.diff.upper_scaled() <= limit && rep.diff.lower_scaled() >= -limit;
  const bool outside = rep.diff.lower_scaled() > limit || rep.diff.upper_scaled() < -limit;
  rep.verdict = inside ? Verdict::pass : (outside ? Verdict::fail : Verdict::undecided);
  return rep;
}

void check_binary_family(long p, long q) {
  if (!(1 <= p && p < q)) throw PreconditionError("binary expansion check needs 1 <= p < q");
  validate(PowerFamily{2, p, q});
}

}  // namespace

NumberOfOnesReport numberof1_check(long l, const PowerFamily& f, unsigned prec_bits) {
  validate(f);
  if (l < 0) throw PreconditionError("l must be >= 0");
  return assemble_numberof1(l, f, frac_sum(f, l, prec_bits));
}

std::vector<NumberOfOnesReport> numberof1_scan(long l_max, const PowerFamily& f, unsigned prec_bits) {
  validate(f);
  if (l_max < 0) throw PreconditionError("l must be >= 0");
  const auto sums = frac_prefix_sums(f, l_max, prec_bits);
  std::vector<NumberOfOnesReport> out;
  for (long l = 0; l <= l_max; ++l) out.push_back(assemble_numberof1(l, f, sums[static_cast<std::size_t>(l)]));
  return out;
}

BinaryExpansionReport binary_expansion_check(long l, long p, long q, unsigned prec_bits) {
  check_binary_family(p, q);
  if (l < 0) throw PreconditionError("l must be >= 0");
  return assemble_binary(l, frac_sum({2, p, q}, l, prec_bits), digit_count(2, l, 1, p, q));
}

std::vector<BinaryExpansionReport> binary_expansion_scan(long l_max, long p, long q, unsigned prec_bits) {
  check_binary_family(p, q);
  if (l_max < 1) throw PreconditionError("l_max must be >= 1");
  const auto sums = frac_prefix_sums({2, p, q}, l_max, prec_bits);
  const auto ones = digit_prefix_counts(2, l_max, 1, p, q);
  std::vector<BinaryExpansionReport> out;
  for (long l = 1; l <= l_max; ++l) {
    const auto i = static_cast<std::size_t>(l);
    out.push_back(assemble_binary(l, sums[i], ones[i]));
  }
  return out;
}

}  // namespace zetaprog
