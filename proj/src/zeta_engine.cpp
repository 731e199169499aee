#include "zetaprog/zeta_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zetaprog/bernoulli.hpp"
#include "zetaprog/log_table.hpp"

namespace zetaprog {

namespace {

constexpr double u = kUnitRoundoff;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// log of the N-independent part of the remainder bound; -inf when (s)_{2K+1} = 0.
double remainder_log_prefactor(double sigma, double t, int order) {
  const std::complex<double> s(sigma, t);
  const double tail_exp = sigma + 2.0 * order + 1.0;
  double acc = std::log(std::abs(s + static_cast<double>(2 * order + 1)) / tail_exp) +
               bernoulli_row(order + 1).log_abs_over_factorial;
  for (int j = 0; j <= 2 * order; ++j) {
    const double m = std::abs(s + static_cast<double>(j));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(m);
  }
  return acc;
}

struct HeadSum {
  std::complex<double> value;
  double err = 0.0;
};

// sum_{m=1}^{N-1} m^{-sigma} e^{-i theta_m}, compensated. `phase(m)` yields
// theta_m mod 2 pi and a bound on its error.
template <class Phase>
HeadSum head_sum(double sigma, std::int64_t n_terms, const std::vector<DD>& logs, Phase phase) {
  DD acc_re, acc_im;
  double err = 0.0;
  double total_amp = 0.0;
  for (std::int64_t m = 1; m < n_terms; ++m) {
    const double log_m = logs[static_cast<std::size_t>(m)].hi;
    const double amp = sigma == 0.0 ? 1.0 : std::exp(-sigma * log_m);
    const auto [theta, theta_err] = phase(m);
    double re = amp, im = 0.0;
    double rel = 0.0;
    if (theta != 0.0 || theta_err != 0.0) {
      re = amp * std::cos(theta);
      im = -amp * std::sin(theta);
      rel += theta_err + 4.0 * u;
    }
    if (sigma != 0.0) rel += 2.0 * u * (2.0 + std::abs(sigma * log_m));
    err += rel * amp;
    total_amp += amp;
    acc_re = acc_re + DD{re, 0.0};
    acc_im = acc_im + DD{im, 0.0};
  }
  const std::complex<double> v(to_double(acc_re), to_double(acc_im));
  // double-double accumulation: |error| <= 4 u^2 (N - 1) sum |x|, plus final rounding
  err += 4.0 * u * u * static_cast<double>(n_terms) * total_amp + u * (std::abs(v.real()) + std::abs(v.imag()));
  return {v, detail::round_up(err)};
}

std::pair<double, double> phase_from_height(double t, const DD& log_m) {
  const DD x = t * log_m;
  const double theta = reduce_two_pi(x);
  return {theta, 4.0 * u + std::abs(x.hi) * 0x1p-100};
}

std::pair<double, double> phase_from_progression(double n, const DD& logk_m) {
  const DD x = n * logk_m;
  double f = frac(x);
  if (f > 0.5) f -= 1.0;
  const double theta = kTwoPi.hi * f;
  return {theta, 16.0 * u + std::abs(x.hi) * 0x1p-97};
}

ComplexApprox assemble(const EmParams& p, const HeadSum& head, const EmTail& tail, double tol, double* rounding_out) {
  const std::complex<double> v = head.value + tail.value;
  const double rounding = head.err + tail.rounding + u * (std::abs(v.real()) + std::abs(v.imag()));
  if (rounding_out != nullptr) *rounding_out = rounding;
  const double err = detail::round_up(p.remainder_bound + rounding);
  if (err > tol) {
    throw ToleranceError("certified error " + fmt(err) + " exceeds tolerance " + fmt(tol) +
                         " (rounding budget at N=" + std::to_string(p.n_terms) + ")");
  }
  return from_value(v, err);
}

void check_tol(double tol) {
  if (!(tol >= 1e-14)) throw PreconditionError("tolerance must be >= 1e-14");
}

}  // namespace

double em_remainder_bound(double sigma, double t, std::int64_t n_terms, int order) {
  const double pre = remainder_log_prefactor(sigma, t, order);
  if (pre == -std::numeric_limits<double>::infinity()) return 0.0;
  const double tail_exp = sigma + 2.0 * order + 1.0;
  return std::exp(pre - tail_exp * std::log(static_cast<double>(n_terms))) * (1.0 + 1e-12);
}

EmParams choose_em_params(double sigma, double t, double tol, const ZetaLimits& limits, double remainder_target,
                          std::int64_t min_terms) {
  if (std::abs(t) > limits.t_max) {
    throw ToleranceError("|Im s| = " + fmt(std::abs(t)) + " exceeds t_max = " + fmt(limits.t_max));
  }
  const double target = remainder_target > 0.0 ? remainder_target : tol / 2.0;
  const auto n_floor = std::max<std::int64_t>(
      {16, static_cast<std::int64_t>(std::ceil(std::abs(t) / 3.0)), min_terms});
  EmParams best;
  best.target_tol = tol;
  for (int order = 1; order <= std::min(limits.order_max, kBernoulliRows - 1); ++order) {
    const double pre = remainder_log_prefactor(sigma, t, order);
    std::int64_t n = n_floor;
    if (pre != -std::numeric_limits<double>::infinity()) {
      const double log_n = (pre - std::log(target)) / (sigma + 2.0 * order + 1.0);
      if (log_n > std::log(static_cast<double>(limits.n_max))) continue;
      n = std::max(n, static_cast<std::int64_t>(std::ceil(std::exp(log_n))));
    }
    while (n <= limits.n_max && em_remainder_bound(sigma, t, n, order) > target) ++n;
    if (n > limits.n_max) continue;
    if (best.n_terms == 0 || n + order < best.n_terms + best.bernoulli_order) {
      best.n_terms = n;
      best.bernoulli_order = order;
      best.remainder_bound = em_remainder_bound(sigma, t, n, order);
    }
  }
  if (best.n_terms == 0) {
    throw ToleranceError("tolerance " + fmt(tol) + " unreachable: truncation N would exceed n_max = " +
                         std::to_string(limits.n_max));
  }
  return best;
}

EmTail em_tail(double sigma, double t, std::int64_t n_terms, int order, double theta, double theta_err) {
  const std::complex<double> s(sigma, t);
  const double n = static_cast<double>(n_terms);
  const double log_n = std::log(n);
  const double amp = sigma == 0.0 ? 1.0 : std::exp(-sigma * log_n);
  const std::complex<double> n_pow(amp * std::cos(theta), -amp * std::sin(theta));  // N^{-s}
  const double base_rel = theta_err + 6.0 * u + (sigma == 0.0 ? 0.0 : 2.0 * u * std::abs(sigma * log_n));

  const std::complex<double> integral = n * n_pow / (s - 1.0);
  const std::complex<double> midpoint = 0.5 * n_pow;
  std::complex<double> total = integral + midpoint;
  double err = (base_rel + 6.0 * u) * std::abs(integral) + base_rel * std::abs(midpoint);

  // P_j = (s)_{2j-1} / N^{2j-1}, advanced two factors at a time in double-double.
  auto factor = [&](int i) { return ComplexDD{two_sum(sigma, static_cast<double>(i)), DD{t, 0.0}} / n; };
  ComplexDD poch = factor(0);
  for (int j = 1; j <= order; ++j) {
    const std::complex<double> p(to_double(poch.re), to_double(poch.im));
    const std::complex<double> term = bernoulli_row(j).over_factorial * p * n_pow;
    total += term;
    err += (base_rel + (4.0 * j + 12.0) * u) * std::abs(term);
    poch = poch * factor(2 * j - 1) * factor(2 * j);
  }
  err += 2.0 * u * static_cast<double>(order + 2) * (std::abs(total.real()) + std::abs(total.imag()));
  return {total, detail::round_up(err)};
}

namespace {

// One evaluation with the default split of tol; when rounding alone would
// fit but the sum does not, a second pass gives the remainder what is left.
template <class Phase>
ComplexApprox run_em(double sigma, double t, double tol, const ZetaLimits& limits, long base, Phase phase_of) {
  auto attempt = [&](double remainder_target, double* rounding) {
    const EmParams p = choose_em_params(sigma, t, tol, limits, remainder_target);
    const auto count = static_cast<std::uint64_t>(p.n_terms);
    const LogSnapshot logs = natural_logs(count);
    const LogSnapshot phase_logs = base == 0 ? logs : base_logs(base, count);
    const auto phase = [&](std::int64_t m) { return phase_of((*phase_logs)[static_cast<std::size_t>(m)]); };
    const HeadSum head = head_sum(sigma, p.n_terms, *logs, phase);
    const auto [theta_n, theta_err] = phase(p.n_terms);
    const EmTail tail = em_tail(sigma, t, p.n_terms, p.bernoulli_order, theta_n, theta_err);
    return assemble(p, head, tail, tol, rounding);
  };
  double rounding = 0.0;
  try {
    return attempt(0.0, &rounding);
  } catch (const ToleranceError&) {
    if (!(rounding > 0.0 && rounding < 0.9 * tol)) throw;
  }
  return attempt(0.95 * (tol - 1.05 * rounding), nullptr);
}

}  // namespace

ComplexApprox zeta_em(std::complex<double> s, double tol, const ZetaLimits& limits) {
  check_tol(tol);
  const double sigma = s.real();
  const double t = s.imag();
  if (!(sigma >= 0.0)) throw PreconditionError("zeta_em needs Re(s) >= 0");
  if (sigma == 1.0 && t == 0.0) throw PreconditionError("zeta has a pole at s = 1");
  if (t < 0.0) return zeta_em(std::conj(s), tol, limits).conj();
  return run_em(sigma, t, tol, limits, 0, [t](const DD& log_m) { return phase_from_height(t, log_m); });
}

ComplexApprox zeta_progression(long k, std::int64_t n, double sigma0, double tol, const ZetaLimits& limits) {
  check_tol(tol);
  if (k < 2) throw PreconditionError("progression base k must be >= 2");
  if (!(sigma0 >= 0.0)) throw PreconditionError("zeta_progression needs sigma0 >= 0");
  if (n < 0) return zeta_progression(k, -n, sigma0, tol, limits).conj();
  if (n == 0) return zeta_em({sigma0, 0.0}, tol, limits);
  const double t = 2.0 * std::numbers::pi * static_cast<double>(n) / std::log(static_cast<double>(k));
  const auto nd = static_cast<double>(n);
  return run_em(sigma0, t, tol, limits, k, [nd](const DD& logk_m) { return phase_from_progression(nd, logk_m); });
}

ComplexApprox zeta_on_line(double sigma0, double t, double tol, const ZetaLimits& limits) {
  return zeta_em({sigma0, t}, tol, limits);
}

ComplexApprox log_gamma(std::complex<double> z) {
  const double nearest = std::round(z.real());
  if (nearest <= 0.0 && std::abs(z - std::complex<double>(nearest, 0.0)) < 1e-6) {
    throw PreconditionError("log_gamma: too close to a pole at " + fmt(nearest));
  }
  int shift = std::max(0, static_cast<int>(std::ceil(0.5 - z.real())));
  while (std::abs(z + static_cast<double>(shift)) < 12.0) ++shift;
  const std::complex<double> w = z + static_cast<double>(shift);
  const double abs_w = std::abs(w);
  const double log_abs_w = std::log(abs_w);
  const double log_sec = -std::log(std::cos(std::arg(w) / 2.0));

  // pick the Stirling order with the smallest certified remainder
  int order = 1;
  double best_log = std::numeric_limits<double>::infinity();
  for (int m = 1; m < kBernoulliRows; ++m) {
    const double lb = bernoulli_row(m + 1).log_abs_stirling - (2.0 * m + 1.0) * log_abs_w + (2.0 * m + 2.0) * log_sec;
    if (lb < best_log) {
      best_log = lb;
      order = m;
    }
  }
  const std::complex<double> log_w = std::log(w);
  const std::complex<double> lead = (w - 0.5) * log_w;
  std::complex<double> v = lead - w + 0.5 * std::log(2.0 * std::numbers::pi);
  double err = std::exp(best_log) * (1.0 + 1e-12);
  err += 6.0 * u * (std::abs(w) * (std::abs(log_w) + 1.0) + std::abs(lead) + 1.0);

  const std::complex<double> inv_w2 = 1.0 / (w * w);
  std::complex<double> power = 1.0 / w;
  for (int j = 1; j <= order; ++j) {
    const std::complex<double> term = bernoulli_row(j).stirling * power;
    v += term;
    err += (4.0 * j + 4.0) * u * std::abs(term);
    power *= inv_w2;
  }
  for (int j = 0; j < shift; ++j) {
    const std::complex<double> lj = std::log(z + static_cast<double>(j));
    v -= lj;
    err += 4.0 * u * (std::abs(lj) + std::abs(v));
  }
  return from_value(v, detail::round_up(err));
}

namespace {

// log cos(z) modulo 2 pi i with an absolute error bound; cos z = e^{-i z}(1 + e^{2 i z})/2 for Im z >= 0.
std::pair<std::complex<double>, double> log_cos(std::complex<double> z) {
  const std::complex<double> i(0.0, 1.0);
  const bool upper = z.imag() >= 0.0;
  const std::complex<double> lead = upper ? -i * z : i * z;
  const std::complex<double> w = std::exp(upper ? 2.0 * i * z : -2.0 * i * z);  // |w| <= 1
  const std::complex<double> one_plus = 1.0 + w;
  const double mag = std::abs(one_plus);
  const std::complex<double> v = lead - std::log(2.0) + std::log(one_plus);
  const double err = 4.0 * u * (std::abs(z) + 2.0) + 8.0 * u / mag;
  return {v, err};
}

}  // namespace

ComplexApprox chi(std::complex<double> s, double /*tol*/) {
  const double re = s.real();
  const double nearest_odd = 2.0 * std::round((re - 1.0) / 2.0) + 1.0;
  if (std::abs(s - std::complex<double>(nearest_odd, 0.0)) < 1e-6) {
    throw PreconditionError("chi: pole-adjacent at odd integer " + fmt(nearest_odd));
  }
  const double nearest_int = std::round(re);
  if (nearest_int <= 0.0 && std::abs(s - std::complex<double>(nearest_int, 0.0)) < 1e-6) {
    throw PreconditionError("chi: too close to non-positive integer " + fmt(nearest_int));
  }
  const double pi = std::numbers::pi;
  const ComplexApprox lg = log_gamma(s);
  const auto [lc, lc_err] = log_cos(pi * s / 2.0);
  const std::complex<double> a = (s - 1.0) * std::log(2.0);
  const std::complex<double> b = s * std::log(pi);
  const std::complex<double> e = a + b - lc - lg.value();
  const double e_err = lg.err + lc_err + 6.0 * u * (std::abs(a) + std::abs(b) + std::abs(lc) + std::abs(lg.value()) + std::abs(s) * pi);
  const std::complex<double> v = std::exp(e);
  const double rel = std::expm1(e_err) + 4.0 * u * (1.0 + std::abs(e.real()));
  return from_value(v, detail::round_up(std::abs(v) * rel));
}

std::complex<double> chi_asymptotic(double sigma, double t) {
  const double pi = std::numbers::pi;
  const std::complex<double> expo(sigma - 0.5, t);
  return std::exp(expo * std::log(2.0 * pi / t) + std::complex<double>(0.0, t + pi / 4.0));
}

FunctionalEquationReport selfcheck_functional_equation(std::span<const double> t_samples, double tol) {
  FunctionalEquationReport rep;
  bool any_fail = false;
  for (const double t : t_samples) {
    FunctionalEquationSample smp;
    smp.t = t;
    if (std::abs(t) < 1e-6) {
      smp.skipped = true;
      smp.note = "zeta(1 - s) has its pole at s = 0; chi(s) zeta(1 - s) undefined";
      rep.samples.push_back(smp);
      continue;
    }
    smp.direct = zeta_em({0.0, t}, tol);
    const ComplexApprox reflected = zeta_em({1.0, -t}, tol);
    smp.via_fe = chi({0.0, t}, tol) * reflected;
    smp.residual = std::abs(smp.direct.value() - smp.via_fe.value());
    smp.budget = smp.direct.err + smp.via_fe.err;
    smp.verdict = smp.residual <= smp.budget ? Verdict::pass : Verdict::fail;
    any_fail = any_fail || smp.verdict == Verdict::fail;
    rep.max_residual = std::max(rep.max_residual, smp.residual);
    rep.samples.push_back(smp);
  }
  rep.verdict = any_fail ? Verdict::fail : Verdict::pass;
  return rep;
}

}  // namespace zetaprog
