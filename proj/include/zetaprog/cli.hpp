#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zetaprog/report.hpp"

namespace zetaprog {

enum class Subcommand { digits, frac_sum, h_verify, zeta, zsum, residual, theorem2, os_check, diag, cache };
enum class OutputFormat { csv, json };

const char* subcommand_name(Subcommand s);

/// Exit statuses of run().
inline constexpr int kExitPass = 0;
inline constexpr int kExitUndecided = 1;  // computation failure or undecided assertion
inline constexpr int kExitInvalid = 2;    // configuration rejected before any work
inline constexpr int kExitFailed = 3;     // a hard assertion was refuted

struct RunConfig {
  Subcommand subcommand = Subcommand::zeta;

  long k = 2;
  long p = 1;
  long q = 2;
  std::optional<long> l;
  std::optional<long> l_min;  // l-range; a single --l is the range [l, l]
  std::optional<long> l_max;
  std::optional<long> a;      // digits: one digit value instead of all

  double sigma0 = 0.0;
  double t = 0.0;
  std::optional<std::int64_t> n;  // zeta: evaluate at sigma0 + 2 pi i n / log k instead of t
  std::optional<double> tol;      // defaults: 1e-12 for zeta, 1e-6 for grid runs
  unsigned prec_bits = 128;
  std::int64_t x_max = 10000;

  std::string check = "key-sum";  // h-verify: key-sum | numberof1 | binary
  std::string kind;               // diag: em-bound | sawtooth | ridout | convexity | chi | fe
  double tighten = 0.0;           // residual: rerun at tol / tighten when > 1
  std::string y = "1/3";          // sawtooth point: "a/b" or "pow:k,p,q" for {k^{p/q}}
  long k_max = 1000;
  long m_max = 200;
  double bound_constant = 1.0;
  double t_min = 1.0;
  double t_max = 1e5;
  int samples = 100;
  long ref_l = 0;
  double ratio = 1.0;
  double threshold = 0.1;
  double slack = 2.0;
  double slope_limit = 0.05;

  std::string cache_action = "info";  // cache: info | merge
  std::vector<std::string> cache_inputs;

  std::string cache_path;  // empty selects $ZPROG_CACHE_DIR, if set
  bool no_cache = false;
  std::string out_path;    // empty writes to the caller's stream
  OutputFormat format = OutputFormat::csv;
  int threads = 1;
  bool deterministic = true;
};

/// First violated precondition as a one-line diagnostic, or nullopt.
std::optional<std::string> validate(const RunConfig& config);

struct RunResult {
  int exit_code = kExitPass;
  Report report;
  std::string diagnostic;  // set for exit codes 1 and 2
};

/// Validates, dispatches and assembles the report (does not write it).
RunResult run(const RunConfig& config);

/// Writes the report to config.out_path (atomically) or to `fallback`.
void emit(const RunConfig& config, const Report& report, std::ostream& fallback);

}  // namespace zetaprog
