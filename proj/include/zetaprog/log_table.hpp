#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "zetaprog/double_double.hpp"

namespace zetaprog {

/// Immutable view of log values for 0..n (entry 0 unused).
using LogSnapshot = std::shared_ptr<const std::vector<DD>>;

/// Natural logarithms log(m), m <= n, correctly rounded to double-double.
/// Tables are shared process-wide and grow on demand; snapshots stay valid.
LogSnapshot natural_logs(std::uint64_t n);
/// log_k(m) = log(m) / log(k), m <= n.
LogSnapshot base_logs(long k, std::uint64_t n);

/// Single log(m) or log_k(m) at double-double precision.
DD log_dd(std::uint64_t m);
DD log_base_dd(long k, std::uint64_t m);

}  // namespace zetaprog
