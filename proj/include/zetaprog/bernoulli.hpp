#pragma once

namespace zetaprog {

inline constexpr int kBernoulliRows = 31;  // B_2 .. B_62

/// Derived quantities for B_{2j}, rendered once from exact rationals.
struct BernoulliRow {
  double b;                       // B_{2j}
  double over_factorial;          // B_{2j} / (2j)!
  double log_abs_over_factorial;  // log |B_{2j} / (2j)!|, rounded up
  double stirling;                // B_{2j} / (2j (2j - 1))
  double log_abs_stirling;        // rounded up
};

/// j in [1, 31].
const BernoulliRow& bernoulli_row(int j);

}  // namespace zetaprog
