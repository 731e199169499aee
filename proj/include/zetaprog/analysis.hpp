#pragma once

#include <span>
#include <string>
#include <vector>

#include "zetaprog/errors.hpp"
#include "zetaprog/exact_arith.hpp"
#include "zetaprog/fixed_interval.hpp"

namespace zetaprog {

/// Outward-rounded enclosure [lo, hi] of a real quantity.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
};

/// |sin(pi x)| for x = k^{d+p/q} from the certified nearest-integer distance.
struct SinPowerBounds {
  Enclosure distance;  // ||x||
  Enclosure abs_sin;   // |sin(pi x)|
  bool separated = false;
  unsigned prec_bits = 0;
  /// 2 ||x|| <= |sin(pi x)| <= pi ||x||, checked on the enclosures.
  Verdict jordan = Verdict::undecided;
};

SinPowerBounds abs_sin_pi_power(const PowerDescriptor& pd, unsigned prec_bits = kDefaultPrecBits,
                                unsigned cap_bits = kPrecCapBits);

struct EmBoundResult {
  long m = 0;
  long l = 0;
  bool emitted = false;  // false for q = 1, where the m-range is vacuous
  std::string note;
  SinPowerBounds sin;
  Enclosure bound;      // min(1/2, B / (l k^{(q-1)l-m} |sin(pi k^{m+l+p/q})|))
  bool capped = false;  // the 1/2 cap is active on the whole enclosure
  Verdict verdict = Verdict::undecided;
};

/// The E_m(l) cap for one m. B is the caller's stand-in for an unstated
/// constant; results are meant to be read as a family over B.
EmBoundResult em_bound(long m, long l, long k, long p, long q, double B = 1.0,
                       unsigned prec_bits = kDefaultPrecBits);

struct EmBoundScan {
  long l = 0;
  std::vector<EmBoundResult> terms;
  Enclosure total;
  Verdict verdict = Verdict::undecided;
};

/// em_bound summed over 0 <= m <= (q-1) l.
EmBoundScan em_bound_sum(long l, long k, long p, long q, double B = 1.0, unsigned prec_bits = kDefaultPrecBits);

struct SawtoothReport {
  long k_max = 0;
  long checked = 0;
  Verdict verdict = Verdict::undecided;
  long first_failure = 0;    // K of the first violated bound, 0 if none
  long first_undecided = 0;  // K where the enclosure could not decide
  double worst_ratio = 0.0;  // max over K of |partial sum + psi| / bound
  long worst_k = 0;
  std::string note;
};

/// Checks |sum_{j<=K} sin(2 pi j y)/(pi j) + psi(y)| <= min(1/2, 1/((2K+1) pi |sin pi y|))
/// for K = 1..k_max, with psi(y) = {y} - 1/2 off the integers and 0 on them.
/// y is a certified enclosure inside [0, 1).
SawtoothReport sawtooth_partial_sum_check(const FixedInterval& y, long k_max);

struct RidoutRow {
  long m = 0;
  Enclosure distance;  // ||k^{m+p/q}||
  Enclosure exponent;  // -log_k(distance) / m
};

struct RidoutTable {
  std::vector<RidoutRow> rows;
  double tail_max = 0.0;  // max exponent (upper end) over m in [m_max/2, m_max]
  long tail_argmax = 0;
  bool positive_finite = false;
};

/// Empirical exponents e_m = -log_k ||k^m k^{p/q}|| / m for m = 1..m_max.
/// Nothing quantitative is asserted: the underlying theorem is ineffective.
RidoutTable ridout_exponent_scan(long k, long p, long q, long m_max, unsigned prec_bits = kDefaultPrecBits);

struct ConvexityRow {
  double t = 0.0;
  double abs_zeta = 0.0;
  double err = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct ConvexityReport {
  double sigma = 0.0;
  std::vector<ConvexityRow> rows;
  double sup_ratio = 0.0;        // the fitted implied constant
  double top_decade_sup = 0.0;   // over t in [t_max/10, t_max]
  double below_sup = 0.0;        // over the rest of the grid
  Verdict verdict = Verdict::undecided;
  std::string note;
};

/// sup |zeta(sigma + i t)| / bound(sigma, t) over t_grid. The bound is
/// t^{1/2 - sigma} log t for sigma <= 0, t^{(1-sigma)/2} log t on [0, 1], and
/// zeta(sigma) for sigma > 1 (checked exactly there). Negative sigma goes
/// through the functional equation.
ConvexityReport convexity_check(double sigma, std::span<const double> t_grid, double tol);

struct ChiAsymptoticRow {
  double t = 0.0;
  bool skipped = false;
  double deviation = 0.0;  // |chi / chi_asymptotic - 1|
  double deviation_err = 0.0;
  double scaled = 0.0;     // t * deviation
};

struct ChiAsymptoticReport {
  double sigma = 0.0;
  std::vector<ChiAsymptoticRow> rows;
  double max_scaled = 0.0;  // fitted C in deviation <= C / t
  Verdict verdict = Verdict::undecided;
  std::string note;
};

/// t |chi(sigma + i t) / asymptotic - 1| over t_grid; passes when the scaled
/// deviation on the upper half of the grid stays within twice its lower-half max.
ChiAsymptoticReport chi_asymptotic_check(std::span<const double> t_grid, double sigma, double tol = 1e-12);

/// n points log-spaced over [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace zetaprog
