#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "zetaprog/complex_approx.hpp"
#include "zetaprog/zeta_engine.hpp"

namespace zetaprog {

/// Grid points are evaluated in fixed blocks n in [256 b + 1, 256 b + 256].
/// Every value depends only on (n, k, sigma0, tol), never on which other
/// points were requested or on the thread count.
inline constexpr std::int64_t kGridBlock = 256;
inline constexpr const char* kEvaluatorVersion = "em-dd-block256-v1";

struct GridOptions {
  int threads = 1;
  ZetaLimits limits;
  /// Called after each finished block with (blocks done, blocks total).
  std::function<void(std::int64_t, std::int64_t)> progress;
};

struct GridStats {
  std::int64_t hits = 0;      // requested points already present
  std::int64_t computed = 0;  // points added by evaluation
};

/// zeta(sigma0 + 2 pi i n / log k) for n >= 1, keyed by n.
class ZetaGrid {
 public:
  ZetaGrid(long k, double sigma0, double tol);

  long k() const { return k_; }
  double sigma0() const { return sigma0_; }
  double tol() const { return tol_; }

  /// Makes 1..n_max available, evaluating every block that misses a point.
  void ensure(std::int64_t n_max, const GridOptions& options = {});

  bool contains(std::int64_t n) const { return entries_.count(n) != 0; }
  const ComplexApprox& at(std::int64_t n) const;
  /// Adds an externally sourced entry (cache); err must not exceed tol.
  void insert(std::int64_t n, const ComplexApprox& z);

  const std::map<std::int64_t, ComplexApprox>& entries() const { return entries_; }
  const GridStats& stats() const { return stats_; }

 private:
  long k_;
  double sigma0_;
  double tol_;
  std::map<std::int64_t, ComplexApprox> entries_;
  GridStats stats_;
};

/// Batched evaluation of one block: the 256 values for n = 256 b + 1, ....
/// All points share the truncation N of the top point; the Dirichlet head is
/// built with anchored phase recurrences, so certified errors include the
/// recurrence drift. Throws ToleranceError if any point misses tol.
std::vector<ComplexApprox> zeta_grid_block(long k, double sigma0, double tol, std::int64_t block,
                                           const ZetaLimits& limits = {});

}  // namespace zetaprog
