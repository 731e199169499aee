#pragma once

#include <stdexcept>
#include <string>

namespace zetaprog {

/// Input violates an operation's precondition (bad p/q, k a q-th power, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested tolerance cannot be met within the evaluator's caps.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured resource cap (bit budget, term cap) would be exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cache file unusable: header mismatch, corrupt row, or I/O failure.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { pass, fail, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

}  // namespace zetaprog
