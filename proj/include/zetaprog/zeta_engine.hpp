#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zetaprog/complex_approx.hpp"
#include "zetaprog/errors.hpp"

namespace zetaprog {

struct ZetaLimits {
  double t_max = 1e8;
  std::int64_t n_max = 4'000'000'000;  // Euler-Maclaurin truncation cap
  int order_max = 30;                  // Bernoulli pairs
};

/// Euler-Maclaurin truncation N and Bernoulli order K for one evaluation.
struct EmParams {
  std::int64_t n_terms = 0;
  int bernoulli_order = 0;
  double target_tol = 0.0;
  double remainder_bound = 0.0;
};

/// Certified bound on the Euler-Maclaurin remainder after K correction terms:
///   |s + 2K + 1| / (sigma + 2K + 1) * |B_{2K+2} / (2K+2)! * (s)_{2K+1}| * N^{-sigma-2K-1}.
double em_remainder_bound(double sigma, double t, std::int64_t n_terms, int order);

/// Minimal-cost (N + K) parameters with N >= max(16, ceil(|t|/3)) and
/// remainder <= remainder_target (tol / 2 when not positive). `min_terms`
/// raises the floor on N (batched evaluation shares one N per block).
/// Throws ToleranceError when the caps are hit.
EmParams choose_em_params(double sigma, double t, double tol, const ZetaLimits& limits = {},
                          double remainder_target = 0.0, std::int64_t min_terms = 0);

struct EmTail {
  std::complex<double> value;  // N^{1-s}/(s-1) + N^{-s}/2 + sum_j B_2j/(2j)! (s)_{2j-1} N^{-s-2j+1}
  double rounding = 0.0;
};

/// Closed-form part of Euler-Maclaurin at truncation N. `theta` is t log N
/// reduced mod 2 pi and `theta_err` bounds its error.
EmTail em_tail(double sigma, double t, std::int64_t n_terms, int order, double theta, double theta_err);

/// zeta(s) for Re(s) >= 0, s != 1, via Euler-Maclaurin. Phases t log n are
/// formed in double-double and reduced mod 2 pi before trigonometry.
/// Negative Im(s) is served by conjugating the result for conj(s).
ComplexApprox zeta_em(std::complex<double> s, double tol, const ZetaLimits& limits = {});

/// zeta(sigma0 + 2 pi i n / log k) at the exact progression point: phases are
/// 2 pi {n log_k m}, so no rounding of the height enters the oscillation.
ComplexApprox zeta_progression(long k, std::int64_t n, double sigma0, double tol,
                               const ZetaLimits& limits = {});

/// zeta(sigma0 + i t); negative t by conjugation.
ComplexApprox zeta_on_line(double sigma0, double t, double tol, const ZetaLimits& limits = {});

/// log Gamma(z) modulo 2 pi i (only exp of it is ever used), by Stirling's
/// series after lifting Re(z) with the recurrence.
ComplexApprox log_gamma(std::complex<double> z);

/// chi(s) = 2^{s-1} pi^s sec(pi s / 2) / Gamma(s), so that zeta(s) = chi(s) zeta(1 - s).
/// Throws PreconditionError within 1e-6 of an odd integer or a non-positive integer.
ComplexApprox chi(std::complex<double> s, double tol = 1e-12);

/// (2 pi / t)^{sigma + i t - 1/2} e^{i (t + pi/4)}, the large-t form of chi.
std::complex<double> chi_asymptotic(double sigma, double t);

struct FunctionalEquationSample {
  double t = 0.0;
  bool skipped = false;
  std::string note;
  ComplexApprox direct;  // zeta(i t)
  ComplexApprox via_fe;  // chi(i t) zeta(1 - i t)
  double residual = 0.0;
  double budget = 0.0;
  Verdict verdict = Verdict::undecided;
};

struct FunctionalEquationReport {
  std::vector<FunctionalEquationSample> samples;
  double max_residual = 0.0;
  Verdict verdict = Verdict::undecided;
};

/// Compares zeta(i t) with chi(i t) zeta(1 - i t); pass iff each residual is
/// within the sum of the two certified errors. t = 0 (the pole of zeta(1 - s))
/// is skipped with a note.
FunctionalEquationReport selfcheck_functional_equation(std::span<const double> t_samples, double tol);

}  // namespace zetaprog
