#include "zetaprog/analysis.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zetaprog/zeta_engine.hpp"

namespace zetaprog {

namespace {

class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  operator mpfr_ptr() { return v_; }

 private:
  mpfr_t v_;
};

constexpr mpfr_prec_t kWork = 192;

// x = ends * 2^-frac_bits, exactly.
void set_scaled(mpfr_ptr out, const mpz_class& scaled, unsigned frac_bits) {
  mpfr_set_prec(out, std::max<mpfr_prec_t>(kWork, static_cast<mpfr_prec_t>(mpz_sizeinbase(scaled.get_mpz_t(), 2) + 8)));
  mpfr_set_z(out, scaled.get_mpz_t(), MPFR_RNDN);
  mpfr_div_2ui(out, out, frac_bits, MPFR_RNDN);
}

// sin(pi x) for x in [0, 1/2], rounded in direction rnd (monotone there).
void sin_pi(mpfr_ptr out, mpfr_ptr x, mpfr_rnd_t rnd) {
  Mpfr pi(kWork + 32);
  mpfr_const_pi(pi, rnd);
  mpfr_mul(out, pi, x, rnd);
  mpfr_sin(out, out, rnd);
}

}  // namespace

SinPowerBounds abs_sin_pi_power(const PowerDescriptor& pd, unsigned prec_bits, unsigned cap_bits) {
  const DistanceResult d = nearest_int_distance(pd, prec_bits, cap_bits);
  SinPowerBounds out;
  out.separated = d.separated;
  out.prec_bits = d.prec_bits;
  const FixedInterval& v = d.value;
  Mpfr lo(kWork), hi(kWork);
  const mpz_class lo_scaled = std::max<mpz_class>(v.lower_scaled(), 0);
  mpz_class hi_scaled = v.upper_scaled();
  const mpz_class half = mpz_class(1) << (v.frac_bits() == 0 ? 0 : v.frac_bits() - 1);
  if (v.frac_bits() > 0 && hi_scaled > half) hi_scaled = half;
  set_scaled(lo, lo_scaled, v.frac_bits());
  set_scaled(hi, hi_scaled, v.frac_bits());
  Mpfr s_lo(kWork + 32), s_hi(kWork + 32), t(kWork + 32), pi_d(kWork + 32);
  sin_pi(s_lo, lo, MPFR_RNDD);
  sin_pi(s_hi, hi, MPFR_RNDU);
  out.distance = {mpfr_get_d(lo, MPFR_RNDD), mpfr_get_d(hi, MPFR_RNDU)};
  out.abs_sin = {mpfr_get_d(s_lo, MPFR_RNDD), mpfr_get_d(s_hi, MPFR_RNDU)};
  // Jordan: 2 d <= sin(pi d) <= pi d on [0, 1/2], decided on the enclosures
  auto times_pi = [&](mpfr_ptr out_v, mpfr_ptr x, mpfr_rnd_t rnd) {
    mpfr_const_pi(out_v, rnd);
    mpfr_mul(out_v, out_v, x, rnd);
  };
  mpfr_mul_2ui(t, hi, 1, MPFR_RNDU);
  const bool lower_ok = mpfr_cmp(t, s_lo) <= 0;
  times_pi(pi_d, lo, MPFR_RNDD);
  const bool upper_ok = mpfr_cmp(s_hi, pi_d) <= 0;
  mpfr_mul_2ui(t, lo, 1, MPFR_RNDD);
  const bool lower_broken = mpfr_cmp(t, s_hi) > 0;
  times_pi(pi_d, hi, MPFR_RNDU);
  const bool upper_broken = mpfr_cmp(s_lo, pi_d) > 0;
  if (lower_ok && upper_ok) {
    out.jordan = Verdict::pass;
  } else if (lower_broken || upper_broken) {
    out.jordan = Verdict::fail;
  } else {
    out.jordan = Verdict::undecided;
  }
  return out;
}

EmBoundResult em_bound(long m, long l, long k, long p, long q, double B, unsigned prec_bits) {
  if (!(B > 0.0)) throw PreconditionError("B must be positive");
  if (l < 1) throw PreconditionError("l must be >= 1");
  validate(PowerFamily{k, p, q});
  const long m_max = (q - 1) * l;
  if (m < 0 || m > m_max) {
    throw PreconditionError("m must lie in [0, (q-1) l] = [0, " + std::to_string(m_max) + "]");
  }
  EmBoundResult r;
  r.m = m;
  r.l = l;
  if (q == 1) {
    r.note = "q = 1: k^{m+l+p} is an integer, sin vanishes and the m-range is vacuous";
    r.verdict = Verdict::pass;
    return r;
  }
  r.emitted = true;
  r.sin = abs_sin_pi_power(PowerDescriptor{k, p, q, m + l}, prec_bits);
  // L = l k^{(q-1)l - m}
  const mpz_class big = mpz_class(l) * ipow(k, static_cast<unsigned long>(m_max - m));
  auto capped = [&](double abs_sin, mpfr_rnd_t rnd) {
    if (abs_sin <= 0.0) return 0.5;
    Mpfr s(kWork);
    mpfr_set_z(s, big.get_mpz_t(), rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU);
    mpfr_mul_d(s, s, abs_sin, rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU);
    mpfr_d_div(s, B, s, rnd);
    return std::min(0.5, mpfr_get_d(s, rnd));
  };
  r.bound = {capped(r.sin.abs_sin.hi, MPFR_RNDD), capped(r.sin.abs_sin.lo, MPFR_RNDU)};
  r.capped = r.bound.lo == 0.5;
  r.verdict = r.sin.separated ? Verdict::pass : Verdict::undecided;
  if (!r.sin.separated) r.note = "distance enclosure still touches 0 at the precision cap";
  return r;
}

EmBoundScan em_bound_sum(long l, long k, long p, long q, double B, unsigned prec_bits) {
  EmBoundScan scan;
  scan.l = l;
  scan.verdict = Verdict::pass;
  for (long m = 0; m <= (q - 1) * l; ++m) {
    EmBoundResult r = em_bound(m, l, k, p, q, B, prec_bits);
    if (r.emitted) {
      scan.total.lo += r.bound.lo;
      scan.total.hi += r.bound.hi;
    }
    if (r.verdict == Verdict::undecided) scan.verdict = Verdict::undecided;
    scan.terms.push_back(std::move(r));
  }
  const double n = static_cast<double>(scan.terms.size());
  scan.total.lo *= 1.0 - n * 0x1p-52;
  scan.total.hi *= 1.0 + n * 0x1p-52;
  return scan;
}

SawtoothReport sawtooth_partial_sum_check(const FixedInterval& y, long k_max) {
  if (k_max < 1) throw PreconditionError("K_max must be >= 1");
  const mpz_class one = mpz_class(1) << y.frac_bits();
  if (y.upper_scaled() < 0 || y.lower_scaled() >= one) throw PreconditionError("y must be enclosed in [0, 1)");
  SawtoothReport rep;
  rep.k_max = k_max;
  if (y.is_exact() && y.mantissa() == 0) {
    // every partial sum vanishes and psi(0) = 0
    rep.checked = k_max;
    rep.verdict = Verdict::pass;
    rep.note = "integer point: partial sums and psi are all zero";
    return rep;
  }
  if (y.lower_scaled() <= 0 || y.upper_scaled() >= one) {
    rep.verdict = Verdict::undecided;
    rep.note = "enclosure touches the jump of psi at an integer";
    return rep;
  }

  const unsigned fb = y.frac_bits();
  const mpfr_prec_t prec = std::max<mpfr_prec_t>(kWork, static_cast<mpfr_prec_t>(fb) + 96);
  Mpfr mid(prec), rad(64), ylo(prec), yhi(prec), arg(prec), term(prec), sum(prec), pi(prec), v(prec);
  mpfr_set_z(mid, y.mantissa().get_mpz_t(), MPFR_RNDN);
  mpfr_div_2ui(mid, mid, fb, MPFR_RNDN);
  mpfr_set_z(rad, y.err_ulp().get_mpz_t(), MPFR_RNDU);
  mpfr_div_2ui(rad, rad, fb, MPFR_RNDU);
  const double r = mpfr_get_d(rad, MPFR_RNDU);
  set_scaled(ylo, y.lower_scaled(), fb);
  set_scaled(yhi, y.upper_scaled(), fb);
  mpfr_const_pi(pi, MPFR_RNDN);

  // |sin(pi y)| over the enclosure; sin(pi y) is unimodal on (0, 1) with peak at 1/2
  auto sin_pi_at = [&](mpfr_ptr x, mpfr_rnd_t rnd) {
    Mpfr a(prec), b(prec), t(prec);
    mpfr_set(a, x, MPFR_RNDN);
    mpfr_ui_sub(b, 1, x, MPFR_RNDN);
    mpfr_min(a, a, b, MPFR_RNDN);  // distance to the nearer of 0, 1: sin(pi y) = sin(pi min(y, 1-y))
    Mpfr pi_dir(prec);
    mpfr_const_pi(pi_dir, rnd);
    mpfr_mul(t, pi_dir, a, rnd);
    mpfr_sin(t, t, rnd);
    return mpfr_get_d(t, rnd);
  };
  const double s_lo = std::min(sin_pi_at(ylo, MPFR_RNDD), sin_pi_at(yhi, MPFR_RNDD));
  const bool spans_half = mpfr_cmp_d(ylo, 0.5) <= 0 && mpfr_cmp_d(yhi, 0.5) >= 0;
  const double s_hi = spans_half ? 1.0 : std::max(sin_pi_at(ylo, MPFR_RNDU), sin_pi_at(yhi, MPFR_RNDU));

  const double ulp = std::ldexp(1.0, -static_cast<int>(prec) + 6);
  mpfr_set_zero(sum, 1);
  rep.verdict = Verdict::pass;
  for (long k = 1; k <= k_max; ++k) {
    // sin(2 pi k y) from the exact fractional part of k y
    mpfr_mul_si(arg, mid, k, MPFR_RNDN);
    mpfr_frac(arg, arg, MPFR_RNDN);
    mpfr_mul(arg, arg, pi, MPFR_RNDN);
    mpfr_mul_2ui(arg, arg, 1, MPFR_RNDN);
    mpfr_sin(term, arg, MPFR_RNDN);
    mpfr_div(term, term, pi, MPFR_RNDN);
    mpfr_div_si(term, term, k, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
    // value at the midpoint: S_K(mid) + mid - 1/2
    mpfr_add(v, sum, mid, MPFR_RNDN);
    mpfr_sub_d(v, v, 0.5, MPFR_RNDN);
    const double kd = static_cast<double>(k);
    const double value = std::abs(mpfr_get_d(v, MPFR_RNDN));
    // rounding (per term and in the sum) plus the spread over the enclosure:
    // |d/dy S_K| <= 2K and |d/dy psi| = 1
    const double spread = ((2.0 * kd + 1.0) * r + (kd + 2.0) * ulp + 1e-300) * (1.0 + 1e-12);
    const double denom = (2.0 * kd + 1.0) * std::numbers::pi;
    const double bound_lo = s_hi > 0.0 ? std::min(0.5, 1.0 / (denom * s_hi) * (1.0 - 1e-15)) : 0.5;
    const double bound_hi = s_lo > 0.0 ? std::min(0.5, 1.0 / (denom * s_lo) * (1.0 + 1e-15)) : 0.5;
    const double value_hi = value * (1.0 + 1e-15) + spread;
    const double value_lo = std::max(0.0, value * (1.0 - 1e-15) - spread);
    const double ratio = value / (0.5 * (bound_lo + bound_hi));
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_k = k;
    }
    ++rep.checked;
    if (value_hi <= bound_lo) continue;
    if (value_lo > bound_hi) {
      if (rep.first_failure == 0) rep.first_failure = k;
      rep.verdict = Verdict::fail;
    } else {
      if (rep.first_undecided == 0) rep.first_undecided = k;
      if (rep.verdict == Verdict::pass) rep.verdict = Verdict::undecided;
    }
  }
  return rep;
}

RidoutTable ridout_exponent_scan(long k, long p, long q, long m_max, unsigned prec_bits) {
  if (q < 2) throw PreconditionError("q = 1 makes k^{m+p/q} an integer; the distance is identically 0");
  if (m_max < 1 || m_max > 10000) throw PreconditionError("m_max must lie in [1, 10^4]");
  validate(PowerFamily{k, p, q});
  RidoutTable tab;
  tab.positive_finite = true;
  const double log_k = std::log(static_cast<double>(k));
  for (long m = 1; m <= m_max; ++m) {
    const SinPowerBounds s = abs_sin_pi_power(PowerDescriptor{k, p, q, m}, prec_bits);
    RidoutRow row;
    row.m = m;
    row.distance = s.distance;
    const double md = static_cast<double>(m);
    row.exponent.lo = -std::log(s.distance.hi) / log_k / md * (1.0 - 1e-14);
    row.exponent.hi = s.distance.lo > 0.0 ? -std::log(s.distance.lo) / log_k / md * (1.0 + 1e-14)
                                          : std::numeric_limits<double>::infinity();
    if (!(row.exponent.lo > 0.0) || !std::isfinite(row.exponent.hi)) tab.positive_finite = false;
    if (2 * m >= m_max && row.exponent.hi > tab.tail_max) {
      tab.tail_max = row.exponent.hi;
      tab.tail_argmax = m;
    }
    tab.rows.push_back(row);
  }
  return tab;
}

namespace {

// zeta(sigma + i t) for any sigma != 1 (negative sigma through the functional equation).
ComplexApprox zeta_anywhere(double sigma, double t, double tol) {
  if (sigma >= 0.0) return zeta_em({sigma, t}, tol);
  const ComplexApprox c = chi({sigma, t});
  const ComplexApprox z = zeta_em({1.0 - sigma, -t}, tol);
  return c * z;
}

double convexity_bound(double sigma, double t) {
  const double lt = std::log(t);
  if (sigma <= 0.0) return std::pow(t, 0.5 - sigma) * lt;
  return std::pow(t, 0.5 * (1.0 - sigma)) * lt;
}

}  // namespace

ConvexityReport convexity_check(double sigma, std::span<const double> t_grid, double tol) {
  if (t_grid.empty()) throw PreconditionError("t grid is empty");
  for (const double t : t_grid) {
    if (!(t >= 2.0 && t <= ZetaLimits{}.t_max)) throw PreconditionError("t grid must lie in [2, t_max]");
  }
  ConvexityReport rep;
  rep.sigma = sigma;
  const double t_top = *std::max_element(t_grid.begin(), t_grid.end());
  bool finite = true;
  if (sigma > 1.0) {
    // absolute convergence: |zeta(sigma + i t)| <= zeta(sigma)
    const ComplexApprox z0 = zeta_em({sigma, 0.0}, tol);
    rep.note = "sigma > 1: compared against zeta(sigma)";
    rep.verdict = Verdict::pass;
    for (const double t : t_grid) {
      const ComplexApprox z = zeta_em({sigma, t}, tol);
      ConvexityRow row{t, z.magnitude(), z.err, z0.re, z.magnitude() / z0.re};
      rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
      if (row.abs_zeta - row.err > z0.re + z0.err) rep.verdict = Verdict::fail;
      rep.rows.push_back(row);
    }
    return rep;
  }
  if (sigma > 1.0 - 1e-12 && sigma < 1.0 + 1e-12) rep.note = "sigma = 1: bound reduces to log t";
  for (const double t : t_grid) {
    const ComplexApprox z = zeta_anywhere(sigma, t, tol);
    ConvexityRow row;
    row.t = t;
    row.abs_zeta = z.magnitude();
    row.err = z.err;
    row.bound = convexity_bound(sigma, t);
    row.ratio = row.abs_zeta / row.bound;
    finite = finite && std::isfinite(row.ratio);
    rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
    if (t >= t_top / 10.0) {
      rep.top_decade_sup = std::max(rep.top_decade_sup, row.ratio);
    } else {
      rep.below_sup = std::max(rep.below_sup, row.ratio);
    }
    rep.rows.push_back(row);
  }
  if (!finite) {
    rep.verdict = Verdict::fail;
  } else if (rep.below_sup == 0.0) {
    rep.verdict = Verdict::undecided;
    rep.note = "grid spans less than a decade; growth not assessable";
  } else {
    rep.verdict = rep.top_decade_sup <= 2.0 * rep.below_sup ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

ChiAsymptoticReport chi_asymptotic_check(std::span<const double> t_grid, double sigma, double tol) {
  if (t_grid.empty()) throw PreconditionError("t grid is empty");
  ChiAsymptoticReport rep;
  rep.sigma = sigma;
  std::vector<double> ts(t_grid.begin(), t_grid.end());
  std::sort(ts.begin(), ts.end());
  for (const double t : ts) {
    if (!(t >= 1.0 && t <= ZetaLimits{}.t_max)) throw PreconditionError("t grid must lie in [1, t_max]");
  }
  double lower_half = 0.0, upper_half = 0.0;
  const std::size_t half = ts.size() / 2;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ChiAsymptoticRow row;
    row.t = ts[i];
    try {
      const ComplexApprox c = chi({sigma, ts[i]}, tol);
      const std::complex<double> a = chi_asymptotic(sigma, ts[i]);
      row.deviation = std::abs(c.value() / a - 1.0);
      row.deviation_err = c.err / std::abs(a) + 8.0 * kUnitRoundoff * (1.0 + std::abs(ts[i] * std::log(ts[i])));
      row.scaled = ts[i] * row.deviation;
    } catch (const PreconditionError& e) {
      row.skipped = true;
      rep.note = std::string("skipped pole-adjacent point: ") + e.what();
    }
    if (!row.skipped) {
      rep.max_scaled = std::max(rep.max_scaled, row.scaled);
      double& side = i < half ? lower_half : upper_half;
      side = std::max(side, row.scaled);
    }
    rep.rows.push_back(row);
  }
  if (ts.size() < 2 || lower_half == 0.0) {
    rep.verdict = Verdict::undecided;
  } else {
    rep.verdict = upper_half <= 2.0 * lower_half ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw PreconditionError("log_spaced needs n >= 1 and 0 < lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace zetaprog
