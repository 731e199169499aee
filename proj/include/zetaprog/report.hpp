#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zetaprog/errors.hpp"

namespace zetaprog {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Assertion {
  std::string name;
  Verdict verdict = Verdict::undecided;
  bool hard = true;  // soft assertions are reported but never change the exit status
  std::string detail;
};

/// Tabular result of one run. CSV lines starting with '#' carry metadata
/// (inputs, assertions, timing, cache use); the remaining lines are the body.
struct Report {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, std::string>> meta;  // wall time, cache stats, notes

  void add_assertion(std::string name, Verdict v, std::string detail, bool hard = true);
  /// pass if every hard assertion passed, fail if any failed, else undecided.
  Verdict overall() const;
};

/// Decimal with 17 significant digits (round-trips doubles).
std::string format_double(double x);

void write_csv(std::ostream& out, const Report& r);
void write_json(std::ostream& out, const Report& r);
/// The CSV body alone: header row and data rows, without metadata lines.
std::string csv_body(const Report& r);

}  // namespace zetaprog
