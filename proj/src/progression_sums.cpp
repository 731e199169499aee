#include "zetaprog/progression_sums.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "zetaprog/exact_arith.hpp"

namespace zetaprog {

namespace {

constexpr double u = kUnitRoundoff;

std::string fmt(double x, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::int64_t default_cap(double sigma0) { return sigma0 >= 0.5 ? (std::int64_t{1} << 22) : (std::int64_t{1} << 18); }

void check_phase(long p, long q) {
  if (q < 1) throw PreconditionError("phase denominator q must be >= 1");
  if (std::gcd(p, q) != 1) throw PreconditionError("p and q must be coprime");
}

void check_grid(const ZetaGrid& grid, long k) {
  if (grid.k() != k) {
    throw PreconditionError("grid base " + std::to_string(grid.k()) + " does not match k=" + std::to_string(k));
  }
}

// e^{2 pi i r / q} with exact values at the quarter turns; second is the error bound.
std::pair<std::complex<double>, double> unit_root(std::int64_t r, long q) {
  if (r == 0) return {{1.0, 0.0}, 0.0};
  if (2 * r == q) return {{-1.0, 0.0}, 0.0};
  if (4 * r == q) return {{0.0, 1.0}, 0.0};
  if (4 * r == 3 * static_cast<std::int64_t>(q)) return {{0.0, -1.0}, 0.0};
  double f = static_cast<double>(r) / static_cast<double>(q);
  if (f > 0.5) f -= 1.0;
  const double theta = kTwoPi.hi * f;
  return {{std::cos(theta), std::sin(theta)}, 6.0 * u};
}

// Pairwise sum in fixed index order.
double pairwise(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(x, lo, mid) + pairwise(x, mid, hi);
}

}  // namespace

void SumLedger::add(double x, double term_err) {
  const double t = value + x;
  if (std::abs(value) >= std::abs(x)) {
    compensation += (value - t) + x;
  } else {
    compensation += (x - t) + value;
  }
  value = t;
  ++n_terms;
  term_errs_ = (term_errs_ + term_err) * (1.0 + 2.0 * u);
  abs_sum_ += std::abs(x);
  // Neumaier: |error| <= 2u |S| + 4 n u^2 sum |x|, with |S| <= sum |x|
  const double rounding = (2.0 * u + 4.0 * static_cast<double>(n_terms) * u * u) * abs_sum_ * (1.0 + 4.0 * u);
  err_budget = std::max(err_budget, term_errs_ + rounding);
}

std::int64_t term_count(double l, long k, bool* near_integer) {
  if (k < 2) throw PreconditionError("k must be >= 2");
  if (!std::isfinite(l)) throw PreconditionError("l must be finite");
  if (near_integer != nullptr) *near_integer = false;
  if (l < 0.0) return 0;
  if (l * std::log2(static_cast<double>(k)) > 62.0) throw BudgetError("k^l exceeds 2^62 terms");
  mpfr_t x, down, up, base;
  mpfr_inits2(256, x, down, up, base, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_si(base, k, MPFR_RNDN);
  mpfr_set_d(x, l, MPFR_RNDN);  // exact: l is a binary double
  mpfr_pow(down, base, x, MPFR_RNDD);
  mpfr_pow(up, base, x, MPFR_RNDU);
  // the round-down value is the largest 256-bit float <= k^l, and every integer
  // below 2^62 is representable, so its floor equals floor(k^l)
  mpfr_floor(x, down);
  const auto count = static_cast<std::int64_t>(mpfr_get_si(x, MPFR_RNDN));
  if (near_integer != nullptr) {
    mpfr_t diff;
    mpfr_init2(diff, 256);
    mpfr_round(diff, up);
    mpfr_sub(diff, diff, up, MPFR_RNDN);
    // an exact integer power is unambiguous; only a near miss is worth noting
    const double gap = std::abs(mpfr_get_d(diff, MPFR_RNDN));
    *near_integer = !mpfr_equal_p(down, up) && gap < 1e-9;
    mpfr_clear(diff);
  }
  mpfr_clears(x, down, up, base, static_cast<mpfr_ptr>(nullptr));
  return count;
}

std::pair<double, double> zsum_term(const ComplexApprox& z, std::int64_t n, long p, long q) {
  const auto pm = static_cast<__int128>(((p % q) + q) % q);
  const auto r = static_cast<std::int64_t>((static_cast<__int128>(n % q) * pm) % q);
  const auto [e, e_err] = unit_root(r, q);
  const double im = z.im * e.real() + z.re * e.imag();
  const double denom = std::numbers::pi * static_cast<double>(n);
  const double value = im / denom;
  const double mag = z.magnitude();
  const double err = (z.err * (1.0 + e_err) + mag * (e_err + 4.0 * u)) / denom + 3.0 * u * std::abs(value);
  return {value, detail::round_up(err)};
}

ZSumResult zsum(double l, long k, long p, long q, ZetaGrid& grid, const ZSumOptions& options) {
  check_phase(p, q);
  check_grid(grid, k);
  bool near = false;
  const std::int64_t n_terms = term_count(l, k, &near);
  const std::int64_t cap = options.n_cap > 0 ? options.n_cap : default_cap(grid.sigma0());
  if (n_terms > cap) {
    const double lk = std::log(static_cast<double>(k));
    const double steps = std::numbers::pi / (3.0 * lk) * static_cast<double>(n_terms) * static_cast<double>(n_terms);
    const double table_mb = 40.0 * 2.0 * std::numbers::pi * static_cast<double>(n_terms) / (3.0 * lk) / 1e6;
    throw BudgetError("floor(k^l) = " + std::to_string(n_terms) + " exceeds N_cap = " + std::to_string(cap) +
                      "; would need about " + fmt(steps) + " Euler-Maclaurin head terms and " + fmt(table_mb) +
                      " MB of phase tables");
  }
  ZSumResult res;
  res.n_terms = n_terms;
  if (near) res.boundary_note = "k^l within 1e-9 of an integer; boundary term fixed by exact directed-rounding comparison";
  if (n_terms == 0) return res;
  grid.ensure(n_terms, options.grid);

  if (options.reduction == Reduction::deterministic) {
    SumLedger ledger;
    for (std::int64_t n = 1; n <= n_terms; ++n) {
      const auto [x, e] = zsum_term(grid.at(n), n, p, q);
      ledger.add(x, e);
    }
    res.value = ledger.total();
    res.err = ledger.err_budget;
    double term_errs = 0.0;
    for (std::int64_t n = 1; n <= n_terms; ++n) term_errs += zsum_term(grid.at(n), n, p, q).second;
    res.rounding = std::max(0.0, res.err - term_errs);
    return res;
  }
  std::vector<double> xs(static_cast<std::size_t>(n_terms));
  double term_errs = 0.0;
  double abs_sum = 0.0;
  for (std::int64_t n = 1; n <= n_terms; ++n) {
    const auto [x, e] = zsum_term(grid.at(n), n, p, q);
    xs[static_cast<std::size_t>(n - 1)] = x;
    term_errs += e;
    abs_sum += std::abs(x);
  }
  res.value = pairwise(xs, 0, xs.size());
  const double depth = std::ceil(std::log2(static_cast<double>(n_terms))) + 8.0;
  const double gamma = depth * u / (1.0 - depth * u);
  res.rounding = detail::round_up(gamma * abs_sum * (1.0 + 2.0 * u));
  const double n = static_cast<double>(n_terms);
  res.err = detail::round_up(term_errs * (1.0 + n * u) + res.rounding);
  return res;
}

ZSumResult zsum(double l, long k, long p, long q, double sigma0, double tol, const ZSumOptions& options) {
  ZetaGrid grid(k, sigma0, tol);
  return zsum(l, k, p, q, grid, options);
}

ComplexApprox zsum_two_sided(double l, long k, long p, long q, ZetaGrid& grid, const ZSumOptions& options) {
  check_phase(p, q);
  check_grid(grid, k);
  const std::int64_t n_terms = term_count(l, k);
  if (n_terms == 0) return {};
  grid.ensure(n_terms, options.grid);
  std::complex<double> acc;
  double abs_sum = 0.0;
  double errs = 0.0;
  const auto pm = ((p % q) + q) % q;
  for (std::int64_t n = -n_terms; n <= n_terms; ++n) {
    if (n == 0) continue;
    const std::int64_t m = n < 0 ? -n : n;
    const ComplexApprox& z = grid.at(m);
    std::complex<double> zn = z.value();
    const auto r = static_cast<std::int64_t>((static_cast<__int128>(((n % q) + q) % q) * pm) % q);
    const auto [e, e_err] = unit_root(r, q);
    if (n < 0) zn = std::conj(zn);
    const std::complex<double> term = zn * e / static_cast<double>(n);
    acc += term;
    abs_sum += std::abs(term.real()) + std::abs(term.imag());
    errs += (z.err * (1.0 + e_err) + z.magnitude() * (e_err + 6.0 * u)) / static_cast<double>(m);
  }
  const double two_n = 2.0 * static_cast<double>(n_terms);
  const double gamma = two_n * u / (1.0 - two_n * u);
  const double scale = 2.0 * std::numbers::pi;
  const std::complex<double> v(acc.imag() / scale, -acc.real() / scale);
  const double err = (errs * (1.0 + two_n * u) + gamma * abs_sum) / scale + 2.0 * u * (std::abs(v.real()) + std::abs(v.imag()));
  return from_value(v, detail::round_up(err));
}

ResidualRecord theorem1_residual(long l, long p, long q, ZetaGrid& grid, const ZSumOptions& options) {
  if (!(1 <= p && p < q)) throw PreconditionError("residual needs 1 <= p < q");
  check_phase(p, q);
  if (l < 0 || l > options.l_cap) {
    throw PreconditionError("l must lie in [0, " + std::to_string(options.l_cap) + "]");
  }
  if (grid.k() != 2 || grid.sigma0() != 0.0) throw PreconditionError("residual needs the k=2, sigma0=0 grid");
  ResidualRecord rec;
  rec.l = l;
  rec.p = p;
  rec.q = q;
  rec.a_count = digit_count(2, l, 1, p, q);
  rec.zeros_count = digit_count(2, l, 0, p, q);
  const ZSumResult z = zsum(static_cast<double>(l), 2, p, q, grid, options);
  rec.z_value = z.value;
  rec.z_err = z.err;
  rec.n_terms = z.n_terms;
  rec.residual = (static_cast<double>(rec.a_count) - 0.5 * static_cast<double>(l)) + z.value;
  rec.residual_err = detail::round_up(z.err + u * std::abs(rec.residual));
  return rec;
}

Theorem2Table theorem2_series(long k, long l_min, long l_max, ZetaGrid& grid, const ZSumOptions& options,
                              double slack, double slope_limit) {
  if (k < 2) throw PreconditionError("k must be >= 2");
  if (l_min < 2 || l_max < l_min) throw PreconditionError("need 2 <= l_min <= l_max");
  if (l_max > options.l_cap) throw PreconditionError("l_max exceeds l_cap = " + std::to_string(options.l_cap));
  check_grid(grid, k);
  if (grid.sigma0() != 0.0) throw PreconditionError("the boundedness series lives on sigma0 = 0");
  Theorem2Table tab;
  tab.k = k;
  tab.slack = slack;
  tab.slope_limit = slope_limit;
  tab.split_l = (l_max + 1) / 2;
  grid.ensure(term_count(static_cast<double>(l_max), k), options.grid);
  double running = 0.0;
  double early_lo = 0.0, early_hi = 0.0, late_lo = 0.0, late_hi = 0.0;
  bool have_early = false, have_late = false;
  for (long l = l_min; l <= l_max; ++l) {
    const ZSumResult z = zsum(static_cast<double>(l), k, 1, 1, grid, options);
    running = std::max(running, std::abs(z.value));
    tab.rows.push_back({l, z.value, z.err, running});
    const double lo = std::max(0.0, std::abs(z.value) - z.err);
    const double hi = std::abs(z.value) + z.err;
    if (l <= tab.split_l) {
      tab.early_max = std::max(tab.early_max, std::abs(z.value));
      early_lo = std::max(early_lo, lo);
      early_hi = std::max(early_hi, hi);
      have_early = true;
    } else {
      tab.late_max = std::max(tab.late_max, std::abs(z.value));
      late_lo = std::max(late_lo, lo);
      late_hi = std::max(late_hi, hi);
      have_late = true;
    }
  }
  if (have_early && have_late) {
    if (late_hi <= early_lo + slack) {
      tab.bounded = Verdict::pass;
    } else if (late_lo > early_hi + slack) {
      tab.bounded = Verdict::fail;
    }
  }
  if (tab.rows.size() >= 2) {
    double mean = 0.0;
    for (const auto& r : tab.rows) mean += static_cast<double>(r.l);
    mean /= static_cast<double>(tab.rows.size());
    double sxx = 0.0;
    for (const auto& r : tab.rows) sxx += (static_cast<double>(r.l) - mean) * (static_cast<double>(r.l) - mean);
    double err = 0.0;
    double mag = 0.0;
    for (const auto& r : tab.rows) {
      const double w = (static_cast<double>(r.l) - mean) / sxx;
      tab.slope += w * std::abs(r.z);
      err += std::abs(w) * r.err;
      mag += std::abs(w * r.z);
    }
    tab.slope_err = detail::round_up(err + 4.0 * u * static_cast<double>(tab.rows.size()) * mag);
    if (tab.slope + tab.slope_err < slope_limit) {
      tab.slope_verdict = Verdict::pass;
    } else if (tab.slope - tab.slope_err >= slope_limit) {
      tab.slope_verdict = Verdict::fail;
    }
  }
  return tab;
}

OsTable os_check(double sigma0, long k, long p, long q, long l_min, long l_max, ZetaGrid& grid,
                 const ZSumOptions& options, long reference_l, double ratio, double threshold) {
  if (!(sigma0 > 0.0 && sigma0 < 1.0)) throw PreconditionError("sigma0 must lie in (0, 1)");
  if (l_min < 1 || l_max < l_min) throw PreconditionError("need 1 <= l_min <= l_max (l = 0 makes Z/l undefined)");
  check_phase(p, q);
  check_grid(grid, k);
  if (grid.sigma0() != sigma0) throw PreconditionError("grid sigma0 does not match");
  if (reference_l == 0) reference_l = l_min;
  if (reference_l < l_min || reference_l > l_max) throw PreconditionError("reference l outside [l_min, l_max]");
  OsTable tab;
  tab.sigma0 = sigma0;
  tab.reference_l = reference_l;
  tab.ratio = ratio;
  tab.threshold = threshold;
  grid.ensure(term_count(static_cast<double>(l_max), k), options.grid);
  for (long l = l_min; l <= l_max; ++l) {
    const ZSumResult z = zsum(static_cast<double>(l), k, p, q, grid, options);
    const double ld = static_cast<double>(l);
    tab.rows.push_back({l, z.value, z.err, z.value / ld, detail::round_up(z.err / ld + u * std::abs(z.value / ld))});
  }
  const OsRow& last = tab.rows.back();
  const OsRow& ref = tab.rows[static_cast<std::size_t>(reference_l - l_min)];
  const double last_hi = std::abs(last.normalized) + last.normalized_err;
  const double last_lo = std::max(0.0, std::abs(last.normalized) - last.normalized_err);
  const double ref_hi = std::abs(ref.normalized) + ref.normalized_err;
  const double ref_lo = std::max(0.0, std::abs(ref.normalized) - ref.normalized_err);
  if (last_hi < ratio * ref_lo && last_hi < threshold) {
    tab.verdict = Verdict::pass;
  } else if (last_lo >= ratio * ref_hi || last_lo >= threshold) {
    tab.verdict = Verdict::fail;
  }
  return tab;
}

}  // namespace zetaprog
