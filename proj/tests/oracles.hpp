#pragma once
// Independent reference computations used only by the test suites.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>

#include "zetaprog/dirichlet_h.hpp"
#include "zetaprog/exact_arith.hpp"
#include "zetaprog/fixed_interval.hpp"

namespace oracle {

/// RAII wrapper for an MPFR value.
struct Real {
  mpfr_t v;
  explicit Real(mpfr_prec_t prec = 512) { mpfr_init2(v, prec); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  ~Real() { mpfr_clear(v); }
};

/// k^{d+p/q} by MPFR's floating q-th root (no integer root involved).
inline void power(Real& out, const zetaprog::PowerDescriptor& pd) {
  Real base(mpfr_get_prec(out.v));
  mpfr_set_si(base.v, pd.k, MPFR_RNDN);
  mpfr_pow_ui(base.v, base.v, static_cast<unsigned long>(pd.q * pd.d + pd.p), MPFR_RNDN);
  mpfr_rootn_ui(out.v, base.v, static_cast<unsigned long>(pd.q), MPFR_RNDN);
}

inline void frac(Real& out, const zetaprog::PowerDescriptor& pd) {
  power(out, pd);
  mpfr_frac(out.v, out.v, MPFR_RNDN);
}

/// Exact check that an MPFR value lies inside a FixedInterval.
inline bool encloses(const zetaprog::FixedInterval& iv, const Real& x) {
  Real lo(mpfr_get_prec(x.v) + 64), hi(mpfr_get_prec(x.v) + 64);
  const auto bits_lo = std::max<std::size_t>(64, mpz_sizeinbase(iv.lower_scaled().get_mpz_t(), 2) + 2);
  const auto bits_hi = std::max<std::size_t>(64, mpz_sizeinbase(iv.upper_scaled().get_mpz_t(), 2) + 2);
  mpfr_set_prec(lo.v, static_cast<mpfr_prec_t>(bits_lo));
  mpfr_set_prec(hi.v, static_cast<mpfr_prec_t>(bits_hi));
  mpfr_set_z_2exp(lo.v, iv.lower_scaled().get_mpz_t(), -static_cast<long>(iv.frac_bits()), MPFR_RNDN);
  mpfr_set_z_2exp(hi.v, iv.upper_scaled().get_mpz_t(), -static_cast<long>(iv.frac_bits()), MPFR_RNDN);
  return mpfr_cmp(lo.v, x.v) <= 0 && mpfr_cmp(x.v, hi.v) <= 0;
}

inline double to_double(const Real& x) { return mpfr_get_d(x.v, MPFR_RNDN); }

/// sum_{n <= x} h(n), term by term.
inline std::int64_t prefix_h_termwise(std::uint64_t x, const zetaprog::ConvolutionParams& cp) {
  std::int64_t s = 0;
  for (std::uint64_t n = 1; n <= x; ++n) s += zetaprog::coeff_h(n, cp);
  return s;
}

/// h(n) from the Dirichlet-convolution definition: sum over all divisors d of n
/// of f(d) g(n/d), with f and g tested by brute force on small integers.
inline std::int64_t coeff_h_by_divisors(std::uint64_t n, long k, long q) {
  auto int_pow = [](std::uint64_t b, long e) {
    std::uint64_t r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
  };
  auto f = [&](std::uint64_t d) {
    for (std::uint64_t v = 1; v <= d; v *= int_pow(static_cast<std::uint64_t>(k), q)) {
      if (v == d) return 1;
    }
    return 0;
  };
  auto g = [&](std::uint64_t m) -> std::int64_t {
    for (std::uint64_t j = 1; int_pow(j, q) <= m; ++j) {
      if (int_pow(j, q) == m) return j % static_cast<std::uint64_t>(k) == 0 ? 1 - k : 1;
    }
    return 0;
  };
  std::int64_t h = 0;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d == 0) h += f(d) * g(n / d);
  }
  return h;
}

}  // namespace oracle
