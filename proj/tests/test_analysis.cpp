#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "zetaprog/analysis.hpp"
#include "zetaprog/zeta_engine.hpp"

using namespace zetaprog;

namespace {

// |sin(pi x)| for x = k^{d+p/q}, straight from MPFR
double oracle_abs_sin(const PowerDescriptor& pd) {
  oracle::Real x(1024);
  oracle::frac(x, pd);
  oracle::Real pi(1024);
  mpfr_const_pi(pi.v, MPFR_RNDN);
  mpfr_mul(x.v, x.v, pi.v, MPFR_RNDN);
  mpfr_sin(x.v, x.v, MPFR_RNDN);
  return std::abs(oracle::to_double(x));
}

}  // namespace

TEST_CASE("sin of powers against the floating oracle") {
  for (long d = 0; d <= 40; ++d) {
    for (const auto& [k, p, q] : {std::tuple{2L, 1L, 2L}, {3L, 1L, 2L}, {2L, 2L, 3L}, {10L, 1L, 3L}}) {
      const PowerDescriptor pd{k, p, q, d};
      const SinPowerBounds s = abs_sin_pi_power(pd);
      const double ref = oracle_abs_sin(pd);
      CAPTURE(d);
      CHECK(s.separated);
      CHECK(s.abs_sin.lo <= ref * (1.0 + 1e-15));
      CHECK(ref <= s.abs_sin.hi * (1.0 + 1e-15));
      CHECK(s.jordan == Verdict::pass);
    }
  }
  const SinPowerBounds integer = abs_sin_pi_power({3, 1, 1, 4});
  CHECK(integer.abs_sin.hi == 0.0);
  CHECK(integer.jordan == Verdict::pass);
}

TEST_CASE("E_m(l) bound") {
  const EmBoundResult r = em_bound(0, 6, 2, 1, 2, 1.0);
  REQUIRE(r.emitted);
  const double s = oracle_abs_sin({2, 1, 2, 6});
  const double expected = std::min(0.5, 1.0 / (6.0 * 64.0 * s));
  CHECK(r.bound.lo <= expected * (1.0 + 1e-14));
  CHECK(expected <= r.bound.hi * (1.0 + 1e-14));
  CHECK(r.bound.hi <= 0.5);
  CHECK(r.verdict == Verdict::pass);
  // large B saturates the cap
  const EmBoundResult big = em_bound(3, 6, 2, 1, 2, 1e9);
  CHECK(big.capped);
  CHECK(big.bound.lo == 0.5);
  // q = 1: vacuous
  const EmBoundResult vac = em_bound(0, 5, 2, 1, 1);
  CHECK_FALSE(vac.emitted);
  CHECK_FALSE(vac.note.empty());
  CHECK_THROWS_AS(em_bound(7, 6, 2, 1, 2), PreconditionError);
  CHECK_THROWS_AS(em_bound(-1, 6, 2, 1, 2), PreconditionError);
  CHECK_THROWS_AS(em_bound(0, 6, 2, 1, 2, 0.0), PreconditionError);

  double prev_hi = 0.0;
  for (long l = 2; l <= 10; ++l) {
    const EmBoundScan scan = em_bound_sum(l, 2, 1, 2);
    CHECK(scan.terms.size() == static_cast<std::size_t>(l + 1));
    CHECK(scan.total.lo <= scan.total.hi);
    CHECK(scan.total.hi <= 0.5 * static_cast<double>(l + 1) * (1.0 + 1e-12));
    CHECK(scan.verdict == Verdict::pass);
    prev_hi = scan.total.hi;
  }
  CHECK(prev_hi > 0.0);
}

TEST_CASE("sawtooth partial sums obey the Fourier tail bound") {
  const FixedInterval zero = FixedInterval::exact_integer(0, 128);
  const SawtoothReport z = sawtooth_partial_sum_check(zero, 1000);
  CHECK(z.verdict == Verdict::pass);
  CHECK(z.checked == 1000);

  const FixedInterval quarter = FixedInterval::from_rational(1, 4, 128);
  const SawtoothReport q = sawtooth_partial_sum_check(quarter, 1000);
  CHECK(q.verdict == Verdict::pass);
  CHECK(q.checked == 1000);
  CHECK(q.worst_ratio < 1.0);
  CHECK(q.worst_ratio > 0.5);

  const SawtoothReport third = sawtooth_partial_sum_check(FixedInterval::from_rational(1, 3, 128), 1000);
  CHECK(third.verdict == Verdict::pass);
  CHECK(third.worst_ratio > 0.9999);  // nearly sharp here

  const SawtoothReport root2 = sawtooth_partial_sum_check(frac_power({2, 1, 2, 0}, 160), 1000);
  CHECK(root2.verdict == Verdict::pass);
  const SawtoothReport cbrt2 = sawtooth_partial_sum_check(frac_power({2, 1, 3, 0}, 160), 1000);
  CHECK(cbrt2.verdict == Verdict::pass);

  // an enclosure straddling the jump at 0 cannot be decided
  const FixedInterval fuzzy(1, 20, 2);
  CHECK(sawtooth_partial_sum_check(fuzzy, 10).verdict == Verdict::undecided);
  CHECK_THROWS_AS(sawtooth_partial_sum_check(FixedInterval::exact_integer(1, 8), 10), PreconditionError);
  CHECK_THROWS_AS(sawtooth_partial_sum_check(quarter, 0), PreconditionError);
}

TEST_CASE("Ridout exponent scan") {
  const RidoutTable small = ridout_exponent_scan(2, 1, 2, 1);
  REQUIRE(small.rows.size() == 1);
  const double e1 = -std::log2(3.0 - 2.0 * std::numbers::sqrt2);
  CHECK(small.rows[0].exponent.lo <= e1 * (1.0 + 1e-13));
  CHECK(e1 <= small.rows[0].exponent.hi * (1.0 + 1e-13));
  CHECK(e1 == doctest::Approx(2.543).epsilon(1e-3));

  const RidoutTable tab = ridout_exponent_scan(2, 1, 2, 2000);
  CHECK(tab.rows.size() == 2000);
  CHECK(tab.positive_finite);
  CHECK(tab.tail_argmax >= 1000);
  CHECK(tab.tail_max > 0.0);
  CHECK(std::isfinite(tab.tail_max));
  CHECK_THROWS_AS(ridout_exponent_scan(2, 1, 1, 10), PreconditionError);
  CHECK_THROWS_AS(ridout_exponent_scan(2, 1, 2, 20000), PreconditionError);
}

TEST_CASE("convexity ratios") {
  const std::vector<double> grid = log_spaced(10.0, 1e5, 25);
  const ConvexityReport c0 = convexity_check(0.0, grid, 1e-8);
  CHECK(c0.rows.size() == 25);
  CHECK(std::isfinite(c0.sup_ratio));
  CHECK(c0.verdict == Verdict::pass);
  const ConvexityReport ch = convexity_check(0.5, grid, 1e-8);
  CHECK(ch.verdict == Verdict::pass);
  const ConvexityReport c2 = convexity_check(2.0, grid, 1e-10);
  CHECK(c2.verdict == Verdict::pass);
  CHECK(c2.sup_ratio <= 1.0);
  const std::vector<double> low = log_spaced(10.0, 2000.0, 12);
  const ConvexityReport neg = convexity_check(-0.5, low, 1e-8);
  CHECK(neg.verdict == Verdict::pass);
  // at sigma = -1/2 the functional equation gives |zeta| of order t log-free
  for (const auto& row : neg.rows) CHECK(row.ratio < 1.0);
  const std::vector<double> bad = {1.0};
  CHECK_THROWS_AS(convexity_check(0.0, bad, 1e-8), PreconditionError);
}

TEST_CASE("chi against its asymptotic form") {
  const std::vector<double> two = {100.0, 10000.0};
  const ChiAsymptoticReport r = chi_asymptotic_check(two, 0.0);
  REQUIRE(r.rows.size() == 2);
  const double shrink = r.rows[0].deviation / r.rows[1].deviation;
  CHECK(shrink > 50.0);
  CHECK(shrink < 200.0);
  const std::vector<double> grid = log_spaced(5.0, 1e5, 30);
  for (const double sigma : {0.0, -0.25}) {
    const ChiAsymptoticReport rep = chi_asymptotic_check(grid, sigma);
    CAPTURE(sigma);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(std::isfinite(rep.max_scaled));
    for (const auto& row : rep.rows) CHECK(row.deviation_err < 0.1 * row.deviation + 1e-9);
  }
}
