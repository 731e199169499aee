#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "zetaprog/complex_approx.hpp"
#include "zetaprog/errors.hpp"
#include "zetaprog/zeta_grid.hpp"

namespace zetaprog {

/// Neumaier-compensated running sum with a certified error budget.
/// `err_budget` covers the summed per-term errors plus the summation
/// rounding bound and never decreases as terms are added.
struct SumLedger {
  double value = 0.0;
  double compensation = 0.0;
  std::int64_t n_terms = 0;
  double err_budget = 0.0;

  void add(double x, double term_err);
  double total() const { return value + compensation; }

 private:
  double term_errs_ = 0.0;
  double abs_sum_ = 0.0;
};

enum class Reduction {
  deterministic,  // ascending n, compensated, single thread
  fast,           // order-fixed pairwise tree
};

struct ZSumOptions {
  Reduction reduction = Reduction::deterministic;
  std::int64_t n_cap = 0;  // 0 selects 2^18 for sigma0 < 1/2 and 2^22 otherwise
  long l_cap = 17;         // for the theorem-level drivers
  GridOptions grid;
};

/// Number of terms floor(k^l) for real l (0 when l < 0), exact via
/// directed-rounding comparison. `near_integer` is set when k^l lies within
/// 1e-9 of an integer, so the boundary term is worth a note in reports.
std::int64_t term_count(double l, long k, bool* near_integer = nullptr);

struct ZSumResult {
  double value = 0.0;
  double err = 0.0;
  double rounding = 0.0;  // summation part of err
  std::int64_t n_terms = 0;
  std::string boundary_note;
};

/// Im(z e^{2 pi i n p / q}) / (pi n) with its error bound (value, err).
std::pair<double, double> zsum_term(const ComplexApprox& z, std::int64_t n, long p, long q);

/// Z = (1/pi) sum_{0 < n <= k^l} Im(zeta(sigma0 + 2 pi i n / log k) e^{2 pi i n p / q} / n),
/// using (and filling) `grid`, whose k must match and whose tol bounds each
/// term. err = sum err_n / (pi n) + rounding.
ZSumResult zsum(double l, long k, long p, long q, ZetaGrid& grid, const ZSumOptions& options = {});
/// Same with a private grid at (k, sigma0, tol).
ZSumResult zsum(double l, long k, long p, long q, double sigma0, double tol, const ZSumOptions& options = {});

/// (1 / 2 pi i) sum_{0 < |n| <= k^l} zeta(s_n) e^{2 pi i n p / q} / n summed as
/// complex numbers over both signs of n; the real-form oracle for zsum.
ComplexApprox zsum_two_sided(double l, long k, long p, long q, ZetaGrid& grid, const ZSumOptions& options = {});

struct ResidualRecord {
  long l = 0;
  long p = 0;
  long q = 0;
  std::int64_t a_count = 0;      // ones among binary digits c_0..c_l of 2^{p/q}
  std::int64_t zeros_count = 0;  // zeros among the same digits
  double z_value = 0.0;
  double z_err = 0.0;
  double residual = 0.0;  // a_count - l/2 + z_value
  double residual_err = 0.0;
  std::int64_t n_terms = 0;
};

/// r(l) = A_2(l; 1, 2^{p/q}) - l/2 + Z(l) with Z over the k = 2, sigma0 = 0 grid.
ResidualRecord theorem1_residual(long l, long p, long q, ZetaGrid& grid, const ZSumOptions& options = {});

struct SeriesRow {
  long l = 0;
  double z = 0.0;
  double err = 0.0;
  double running_max = 0.0;  // max |Z| over rows so far
};

struct Theorem2Table {
  long k = 0;
  std::vector<SeriesRow> rows;
  long split_l = 0;  // early rows l <= split_l, late rows l > split_l
  double early_max = 0.0;
  double late_max = 0.0;
  double slack = 2.0;
  Verdict bounded = Verdict::undecided;  // late max <= early max + slack
  double slope = 0.0;                    // least squares of |Z(l)| against l
  double slope_err = 0.0;
  double slope_limit = 0.05;
  Verdict slope_verdict = Verdict::undecided;
};

/// Z(l; 1, 1, k) for l_min..l_max plus the two boundedness proxies. The
/// implied constant is never stated, so both thresholds are conventions.
Theorem2Table theorem2_series(long k, long l_min, long l_max, ZetaGrid& grid, const ZSumOptions& options = {},
                              double slack = 2.0, double slope_limit = 0.05);

struct OsRow {
  long l = 0;
  double z = 0.0;
  double err = 0.0;
  double normalized = 0.0;  // Z / l
  double normalized_err = 0.0;
};

struct OsTable {
  double sigma0 = 0.0;
  std::vector<OsRow> rows;
  long reference_l = 0;
  double ratio = 1.0;
  double threshold = 0.1;
  Verdict verdict = Verdict::undecided;  // |Z/l| at l_max < ratio |Z/l| at reference_l and < threshold
};

/// Z_{sigma0}(l) / l for 0 < sigma0 < 1; the normalized sum should tend to 0.
/// reference_l = 0 selects l_min.
OsTable os_check(double sigma0, long k, long p, long q, long l_min, long l_max, ZetaGrid& grid,
                 const ZSumOptions& options = {}, long reference_l = 0, double ratio = 1.0, double threshold = 0.1);

}  // namespace zetaprog
