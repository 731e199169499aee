#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "zetaprog/errors.hpp"
#include "zetaprog/exact_arith.hpp"
#include "zetaprog/fixed_interval.hpp"

namespace zetaprog {

/// Parameters of the convolution h = f * g built from b_k and q-th powers.
struct ConvolutionParams {
  long k = 2;
  long q = 2;
};

void validate(const ConvolutionParams& cp);

/// b_k(n) = 1 - k if k | n, else 1.
inline std::int64_t coeff_b(const mpz_class& n, long k) {
  return mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(k)) ? 1 - k : 1;
}

/// h(n) = sum over d >= 0 with k^{qd} | n of g(n / k^{qd}), where g(j^q) = b_k(j)
/// and g vanishes off q-th powers.
std::int64_t coeff_h(std::uint64_t n, const ConvolutionParams& cp);

/// sum_{n <= x} h(n) through the regrouping over d (never term by term).
mpz_class prefix_h(const mpz_class& x, const ConvolutionParams& cp);

/// Telescoped fractional-part form
///   sum_{d=0}^{D} ( -{x^{1/q}/k^d} + k {x^{1/q}/k^{d+1}} ),  D = floor(log_k(x) / q),
/// which equals prefix_h(x) exactly.
FixedInterval key_sum_rhs(const mpz_class& x, const ConvolutionParams& cp,
                          unsigned prec_bits = kDefaultPrecBits);

struct KeySumReport {
  mpz_class x;
  mpz_class lhs;     // prefix_h(x)
  FixedInterval rhs; // key_sum_rhs(x)
  unsigned prec_bits = 0;
  Verdict verdict = Verdict::undecided;
};

/// Pass iff the integer prefix_h(x) lies in the rhs enclosure and that enclosure
/// pins down a single integer; precision doubles up to cap_bits otherwise.
KeySumReport verify_key_sum(const mpz_class& x, const ConvolutionParams& cp,
                            unsigned prec_bits = kDefaultPrecBits, unsigned cap_bits = kPrecCapBits);

struct NumberOfOnesReport {
  long l = 0;
  mpz_class prefix;        // prefix_h(k^{ql+p})
  FixedInterval frac_sum;  // A(l)
  FixedInterval diff;      // prefix - (k-1) A(l)
  long bound = 0;          // |diff| <= k
  Verdict verdict = Verdict::undecided;
};

/// Links prefix_h at x = k^{ql+p} to (k-1) A(l). The discarded terms are
/// -k{k^{l+p/q}} and k^{p/q} (q >= 2), so |diff| <= k.
NumberOfOnesReport numberof1_check(long l, const PowerFamily& f, unsigned prec_bits = kDefaultPrecBits);
std::vector<NumberOfOnesReport> numberof1_scan(long l_max, const PowerFamily& f,
                                               unsigned prec_bits = kDefaultPrecBits);

struct BinaryExpansionReport {
  long l = 0;
  FixedInterval frac_sum;    // sum_{0<=m<=l} {2^{m+p/q}}
  std::int64_t ones = 0;     // #{0<=d<=l : floor(2^{d+p/q}) odd}
  FixedInterval diff;        // frac_sum - ones
  double bound = 2.0;
  Verdict verdict = Verdict::undecided;
};

/// Base-2 fractional-part sum versus the count of binary digits equal to 1.
/// Exact accounting of the dropped terms puts the difference in (-2, 1).
BinaryExpansionReport binary_expansion_check(long l, long p, long q, unsigned prec_bits = kDefaultPrecBits);
/// Reports for l = 1..l_max sharing one pass over d.
std::vector<BinaryExpansionReport> binary_expansion_scan(long l_max, long p, long q,
                                                         unsigned prec_bits = kDefaultPrecBits);

}  // namespace zetaprog
