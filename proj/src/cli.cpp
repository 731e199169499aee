#include "zetaprog/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "zetaprog/analysis.hpp"
#include "zetaprog/cache_file.hpp"
#include "zetaprog/dirichlet_h.hpp"
#include "zetaprog/exact_arith.hpp"
#include "zetaprog/progression_sums.hpp"
#include "zetaprog/zeta_engine.hpp"
#include "zetaprog/zeta_grid.hpp"

namespace zetaprog {

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::digits: return "digits";
    case Subcommand::frac_sum: return "frac-sum";
    case Subcommand::h_verify: return "h-verify";
    case Subcommand::zeta: return "zeta";
    case Subcommand::zsum: return "zsum";
    case Subcommand::residual: return "residual";
    case Subcommand::theorem2: return "theorem2";
    case Subcommand::os_check: return "os-check";
    case Subcommand::diag: return "diag";
    case Subcommand::cache: return "cache";
  }
  return "?";
}

namespace {

constexpr double kGridTol = 1e-6;
constexpr double kPointTol = 1e-12;
constexpr double kResidualErrLimit = 1e-3;

double tol_of(const RunConfig& c) {
  if (c.tol) return *c.tol;
  return c.subcommand == Subcommand::zeta || c.subcommand == Subcommand::diag ? kPointTol : kGridTol;
}

struct LRange {
  long lo;
  long hi;
};

LRange l_range(const RunConfig& c, long lo, long hi) {
  if (c.l) return {*c.l, *c.l};
  return {c.l_min.value_or(lo), c.l_max.value_or(hi)};
}

LRange default_range(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::residual: return l_range(c, 4, 17);
    case Subcommand::theorem2: return l_range(c, 2, c.k == 2 ? 17 : 10);
    case Subcommand::os_check: return l_range(c, 2, 14);
    case Subcommand::h_verify: return l_range(c, c.check == "binary" ? 1 : 0, c.check == "binary" ? 200 : 12);
    default: return l_range(c, 0, 0);
  }
}

template <class F>
std::optional<std::string> precondition(F&& f) {
  try {
    f();
  } catch (const PreconditionError& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

std::string str(double x) { return format_double(x); }
std::string str(long x) { return std::to_string(x); }

struct ParsedPoint {
  FixedInterval y;
  std::string label;
};

// "a/b" gives the rational a/b reduced into [0, 1); "pow:k,p,q" gives {k^{p/q}}.
ParsedPoint parse_point(const std::string& s, unsigned prec_bits) {
  if (s.rfind("pow:", 0) == 0) {
    long k = 0, p = 0, q = 0;
    char tail = 0;
    if (std::sscanf(s.c_str() + 4, "%ld,%ld,%ld%c", &k, &p, &q, &tail) != 3) {
      throw PreconditionError("--y '" + s + "' is not of the form pow:k,p,q");
    }
    return {frac_power({k, p, q, 0}, std::max(prec_bits, 192u)), s};
  }
  long a = 0, b = 1;
  char tail = 0;
  const int got = std::sscanf(s.c_str(), "%ld/%ld%c", &a, &b, &tail);
  if (got == 1) b = 1;
  if ((got != 1 && got != 2) || b <= 0 || a < 0) {
    throw PreconditionError("--y '" + s + "' is not a non-negative fraction a/b or pow:k,p,q");
  }
  return {FixedInterval::from_rational(a % b, b, std::max(prec_bits, 192u)), s};
}

std::optional<std::string> validate_range(const RunConfig& c, long floor_l, long cap_l) {
  const LRange r = default_range(c);
  if (r.lo < floor_l) return "l must be >= " + std::to_string(floor_l) + " (got " + std::to_string(r.lo) + ")";
  if (r.hi < r.lo) return "empty l-range " + std::to_string(r.lo) + ".." + std::to_string(r.hi);
  if (r.hi > cap_l) return "l must be <= " + std::to_string(cap_l) + " (got " + std::to_string(r.hi) + ")";
  return std::nullopt;
}

std::optional<std::string> validate_t_grid(const RunConfig& c) {
  if (!(c.t_min > 0.0 && c.t_min < c.t_max && c.t_max <= 1e8)) return "need 0 < t-min < t-max <= 1e8";
  if (c.samples < 2 || c.samples > 100000) return "samples must lie in [2, 100000]";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate(const RunConfig& c) {
  if (c.threads < 1 || c.threads > 1024) return "threads must lie in [1, 1024]";
  if (c.prec_bits < 16 || c.prec_bits > kPrecCapBits) return "prec must lie in [16, " + std::to_string(kPrecCapBits) + "]";
  if (c.tol && !(*c.tol >= 1e-14 && *c.tol <= 0.1)) return "tol must lie in [1e-14, 0.1]";
  if (c.l && (c.l_min || c.l_max)) return "give either --l or --l-range, not both";

  switch (c.subcommand) {
    case Subcommand::digits:
      if (auto e = precondition([&] { validate(PowerFamily{c.k, c.p, c.q}); })) return e;
      if (!c.l || *c.l < 0 || *c.l > 1'000'000) return "digits needs --l in [0, 1e6]";
      if (c.a && (*c.a < 0 || *c.a >= c.k)) return "digit --a must lie in [0, k)";
      return std::nullopt;
    case Subcommand::frac_sum:
      if (auto e = precondition([&] { validate(PowerFamily{c.k, c.p, c.q}); })) return e;
      if (!c.l || *c.l < 0 || *c.l > 100'000) return "frac-sum needs --l in [0, 1e5]";
      return std::nullopt;
    case Subcommand::h_verify:
      if (c.check == "key-sum") {
        if (auto e = precondition([&] { validate(ConvolutionParams{c.k, c.q}); })) return e;
        if (c.x_max < 2 || c.x_max > 10'000'000) return "x-max must lie in [2, 1e7]";
        return std::nullopt;
      }
      if (c.check == "numberof1") {
        if (auto e = precondition([&] { validate(PowerFamily{c.k, c.p, c.q}); })) return e;
        return validate_range(c, 0, 2000);
      }
      if (c.check == "binary") {
        if (auto e = precondition([&] { validate(PowerFamily{2, c.p, c.q}); })) return e;
        return validate_range(c, 1, 100'000);
      }
      return "unknown --check '" + c.check + "' (key-sum, numberof1, binary)";
    case Subcommand::zeta:
      if (c.sigma0 < 0.0 || c.sigma0 > 1e6) return "sigma0 must lie in [0, 1e6]";
      if (c.n) {
        if (c.k < 2) return "k must be >= 2";
        if (c.sigma0 == 1.0 && *c.n == 0) return "s = 1 is the pole";
      } else {
        if (c.sigma0 == 1.0 && c.t == 0.0) return "s = 1 is the pole";
        if (std::abs(c.t) > 1e8) return "|t| must be <= 1e8";
      }
      return std::nullopt;
    case Subcommand::zsum:
      if (c.k < 2) return "k must be >= 2";
      if (c.q < 1 || c.p < 0) return "need p >= 0 and q >= 1";
      if (!(c.sigma0 >= 0.0 && c.sigma0 < 1.0)) return "sigma0 must lie in [0, 1)";
      if (!c.l || *c.l < 0 || *c.l > 64) return "zsum needs --l in [0, 64]";
      return std::nullopt;
    case Subcommand::residual:
      if (!(1 <= c.p && c.p < c.q) || std::gcd(c.p, c.q) != 1) return "residual needs coprime 1 <= p < q";
      if (c.k != 2 || c.sigma0 != 0.0) return "residual runs at k = 2, sigma0 = 0";
      if (c.tighten != 0.0 && !(c.tighten > 1.0)) return "tighten must be 0 (off) or > 1";
      if (c.tighten != 0.0 && tol_of(c) / c.tighten < 1e-14) return "tol / tighten must be >= 1e-14";
      return validate_range(c, 0, 17);
    case Subcommand::theorem2:
      if (c.k < 2) return "k must be >= 2";
      if (c.sigma0 != 0.0) return "theorem2 runs at sigma0 = 0";
      if (!(c.slack >= 0.0) || !(c.slope_limit > 0.0)) return "need slack >= 0 and slope-limit > 0";
      return validate_range(c, 0, 17);
    case Subcommand::os_check:
      if (c.k < 2) return "k must be >= 2";
      if (c.q < 1 || c.p < 0) return "need p >= 0 and q >= 1";
      if (!(c.sigma0 > 0.0 && c.sigma0 < 1.0)) return "os-check needs 0 < sigma0 < 1";
      if (!(c.ratio > 0.0) || !(c.threshold > 0.0)) return "ratio and threshold must be positive";
      if (auto e = validate_range(c, 1, 17)) return e;
      if (c.ref_l != 0) {
        const LRange r = default_range(c);
        if (c.ref_l < r.lo || c.ref_l > r.hi) return "ref-l must lie inside the l-range";
      }
      return std::nullopt;
    case Subcommand::diag:
      if (c.kind == "em-bound") {
        if (auto e = precondition([&] { validate(PowerFamily{c.k, c.p, c.q}); })) return e;
        if (!c.l || *c.l < 1 || *c.l > 10'000) return "em-bound needs --l in [1, 1e4]";
        if (!(c.bound_constant > 0.0)) return "B must be positive";
        return std::nullopt;
      }
      if (c.kind == "sawtooth") {
        if (c.k_max < 1 || c.k_max > 1'000'000) return "k-max must lie in [1, 1e6]";
        return precondition([&] { parse_point(c.y, c.prec_bits); });
      }
      if (c.kind == "ridout") {
        if (auto e = precondition([&] { validate(PowerFamily{c.k, c.p, c.q}); })) return e;
        if (c.q < 2) return "ridout needs q >= 2";
        if (c.m_max < 1 || c.m_max > 10'000) return "m-max must lie in [1, 1e4]";
        return std::nullopt;
      }
      if (c.kind == "convexity" || c.kind == "chi" || c.kind == "fe") {
        if (std::abs(c.sigma0) > 100.0) return "|sigma0| must be <= 100";
        if (c.kind == "convexity" && c.sigma0 == 1.0) return "convexity at sigma0 = 1 is not covered";
        return validate_t_grid(c);
      }
      return "unknown --kind '" + c.kind + "' (em-bound, sawtooth, ridout, convexity, chi, fe)";
    case Subcommand::cache:
      if (c.cache_path.empty()) return "cache needs --cache PATH";
      if (c.cache_action == "info") return std::nullopt;
      if (c.cache_action == "merge") {
        if (c.cache_inputs.empty()) return "cache merge needs at least one input file";
        return std::nullopt;
      }
      return "unknown cache action '" + c.cache_action + "' (info, merge)";
  }
  return "unknown subcommand";
}

namespace {

void input(Report& r, const std::string& key, const std::string& value) { r.inputs.emplace_back(key, value); }

ZSumOptions zsum_options(const RunConfig& c) {
  ZSumOptions o;
  o.reduction = c.deterministic ? Reduction::deterministic : Reduction::fast;
  o.grid.threads = c.threads;
  return o;
}

// Grid with optional persistent backing. Cache I/O happens only here, on the
// orchestrating thread.
class GridSession {
 public:
  GridSession(const RunConfig& c, long k, double sigma0, double tol, Report& report)
      : grid_(k, sigma0, tol), report_(report) {
    if (c.no_cache) {
      report_.meta.emplace_back("cache", "disabled");
      return;
    }
    if (!c.cache_path.empty()) {
      path_ = c.cache_path;
    } else {
      path_ = default_cache_path(k, sigma0, tol);
    }
    if (!path_) {
      report_.meta.emplace_back("cache", "none");
      return;
    }
    const CacheLoad load = load_grid(grid_, *path_);
    report_.meta.emplace_back("cache_path", path_->string());
    report_.meta.emplace_back("cache_load", load.note);
    report_.meta.emplace_back("cache_rows_loaded", std::to_string(load.rows));
    writable_ = load.used || load.note == "absent";
  }

  ZetaGrid& grid() { return grid_; }

  void finish() {
    report_.meta.emplace_back("grid_hits", std::to_string(grid_.stats().hits));
    report_.meta.emplace_back("grid_computed", std::to_string(grid_.stats().computed));
    if (path_ && writable_ && grid_.stats().computed > 0) {
      save_grid(grid_, *path_);
      report_.meta.emplace_back("cache_saved", std::to_string(grid_.entries().size()));
    }
  }

 private:
  ZetaGrid grid_;
  Report& report_;
  std::optional<std::filesystem::path> path_;
  bool writable_ = false;
};

void run_digits(const RunConfig& c, Report& r) {
  input(r, "k", str(c.k));
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l", str(*c.l));
  if (c.a) input(r, "a", str(*c.a));
  r.columns = {"a", "count"};
  std::int64_t total = 0;
  for (long a = 0; a < c.k; ++a) {
    const std::int64_t n = digit_count(c.k, *c.l, a, c.p, c.q);
    total += n;
    if (!c.a || *c.a == a) r.rows.push_back({std::int64_t{a}, n});
  }
  r.add_assertion("digit_partition", total == *c.l + 1 ? Verdict::pass : Verdict::fail,
                  "counts over all digits sum to l+1 = " + std::to_string(*c.l + 1) + ", got " + std::to_string(total));
}

void run_frac_sum(const RunConfig& c, Report& r) {
  input(r, "k", str(c.k));
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l", str(*c.l));
  input(r, "prec", std::to_string(c.prec_bits));
  r.columns = {"l", "value", "radius", "lower", "upper"};
  const auto sums = frac_prefix_sums({c.k, c.p, c.q}, *c.l, c.prec_bits);
  for (std::size_t d = 0; d < sums.size(); ++d) {
    const FixedInterval& s = sums[d];
    r.rows.push_back({static_cast<std::int64_t>(d), s.midpoint(), s.radius(), s.lower_bound(), s.upper_bound()});
  }
  const double width = sums.back().upper_bound() - sums.back().lower_bound();
  r.add_assertion("enclosure_width", width <= 1e-6 ? Verdict::pass : Verdict::undecided,
                  "final enclosure width " + str(width));
}

void run_h_key_sum(const RunConfig& c, Report& r) {
  const ConvolutionParams cp{c.k, c.q};
  input(r, "k", str(c.k));
  input(r, "q", str(c.q));
  input(r, "x_max", str(c.x_max));
  r.columns = {"x", "prefix_h", "rhs_lower", "rhs_upper", "prec", "verdict"};
  std::int64_t bad = 0, undecided = 0, mismatch = 0;
  mpz_class running = coeff_h(1, cp);
  for (std::int64_t x = 2; x <= c.x_max; ++x) {
    running += coeff_h(static_cast<std::uint64_t>(x), cp);
    const KeySumReport k = verify_key_sum(mpz_class(static_cast<long>(x)), cp, c.prec_bits);
    if (k.lhs != running) ++mismatch;
    if (k.verdict == Verdict::fail) ++bad;
    if (k.verdict == Verdict::undecided) ++undecided;
    r.rows.push_back({x, k.lhs.get_str(), k.rhs.lower_bound(), k.rhs.upper_bound(),
                      static_cast<std::int64_t>(k.prec_bits), std::string(to_string(k.verdict))});
  }
  r.add_assertion("key_sum_identity", bad ? Verdict::fail : (undecided ? Verdict::undecided : Verdict::pass),
                  std::to_string(bad) + " failed, " + std::to_string(undecided) + " undecided of " +
                      std::to_string(c.x_max - 1));
  r.add_assertion("prefix_matches_termwise", mismatch ? Verdict::fail : Verdict::pass,
                  std::to_string(mismatch) + " mismatches against the running sum of h(n)");
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::undecided || b == Verdict::undecided) return Verdict::undecided;
  return Verdict::pass;
}

void run_h_numberof1(const RunConfig& c, Report& r) {
  const LRange lr = default_range(c);
  input(r, "k", str(c.k));
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l_range", str(lr.lo) + ".." + str(lr.hi));
  r.columns = {"l", "prefix_h", "frac_sum", "frac_sum_radius", "diff_lower", "diff_upper", "bound", "verdict"};
  Verdict v = Verdict::pass;
  const auto scan = numberof1_scan(lr.hi, {c.k, c.p, c.q}, c.prec_bits);
  for (const auto& row : scan) {
    if (row.l < lr.lo) continue;
    v = combine(v, row.verdict);
    r.rows.push_back({std::int64_t{row.l}, row.prefix.get_str(), row.frac_sum.midpoint(), row.frac_sum.radius(),
                      row.diff.lower_bound(), row.diff.upper_bound(), std::int64_t{row.bound},
                      std::string(to_string(row.verdict))});
  }
  r.add_assertion("numberof1_bound", v, "|prefix_h(k^(ql+p)) - (k-1) A(l)| <= k on every row");
}

void run_h_binary(const RunConfig& c, Report& r) {
  const LRange lr = default_range(c);
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l_range", str(lr.lo) + ".." + str(lr.hi));
  r.columns = {"l", "frac_sum", "frac_sum_radius", "ones", "diff_lower", "diff_upper", "bound", "verdict"};
  Verdict v = Verdict::pass;
  for (const auto& row : binary_expansion_scan(lr.hi, c.p, c.q, c.prec_bits)) {
    if (row.l < lr.lo) continue;
    v = combine(v, row.verdict);
    r.rows.push_back({std::int64_t{row.l}, row.frac_sum.midpoint(), row.frac_sum.radius(), row.ones,
                      row.diff.lower_bound(), row.diff.upper_bound(), row.bound, std::string(to_string(row.verdict))});
  }
  r.add_assertion("binary_expansion_bound", v, "|frac_sum - ones| <= 2 on every row");
}

void run_zeta(const RunConfig& c, Report& r) {
  const double tol = tol_of(c);
  input(r, "sigma0", str(c.sigma0));
  input(r, "tol", str(tol));
  ComplexApprox z;
  double t = c.t;
  if (c.n) {
    input(r, "k", str(c.k));
    input(r, "n", str(*c.n));
    z = zeta_progression(c.k, *c.n, c.sigma0, tol);
    t = 2.0 * M_PI * static_cast<double>(*c.n) / std::log(static_cast<double>(c.k));
  } else {
    input(r, "t", str(c.t));
    z = zeta_em({c.sigma0, c.t}, tol);
  }
  r.columns = {"sigma", "t", "re", "im", "err"};
  r.rows.push_back({c.sigma0, t, z.re, z.im, z.err});
  r.add_assertion("certified_within_tol", z.err <= tol ? Verdict::pass : Verdict::fail,
                  "err " + str(z.err) + " vs tol " + str(tol));
}

void run_zsum(const RunConfig& c, Report& r) {
  const double tol = tol_of(c);
  input(r, "k", str(c.k));
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l", str(*c.l));
  input(r, "sigma0", str(c.sigma0));
  input(r, "tol", str(tol));
  GridSession session(c, c.k, c.sigma0, tol, r);
  const ZSumResult z = zsum(static_cast<double>(*c.l), c.k, c.p, c.q, session.grid(), zsum_options(c));
  session.finish();
  r.columns = {"l", "n_terms", "z", "err", "rounding"};
  r.rows.push_back({std::int64_t{*c.l}, z.n_terms, z.value, z.err, z.rounding});
  if (!z.boundary_note.empty()) r.meta.emplace_back("boundary", z.boundary_note);
  r.add_assertion("err_certified", std::isfinite(z.err) ? Verdict::pass : Verdict::undecided, "err " + str(z.err));
}

void run_residual(const RunConfig& c, Report& r) {
  const double tol = tol_of(c);
  const LRange lr = default_range(c);
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "l_range", str(lr.lo) + ".." + str(lr.hi));
  input(r, "tol", str(tol));
  if (c.tighten > 0.0) input(r, "tighten", str(c.tighten));

  r.columns = {"l", "ones", "zeros", "n_terms", "z", "z_err", "residual", "residual_err", "abs_r_over_l"};
  if (c.tighten > 0.0) {
    r.columns.insert(r.columns.end(), {"residual_tight", "residual_tight_err", "shift"});
  }
  GridSession session(c, 2, 0.0, tol, r);
  std::vector<ResidualRecord> recs;
  for (long l = lr.lo; l <= lr.hi; ++l) recs.push_back(theorem1_residual(l, c.p, c.q, session.grid(), zsum_options(c)));
  session.finish();

  std::vector<ResidualRecord> tight;
  if (c.tighten > 0.0) {
    Report scratch;
    RunConfig tc = c;
    tc.tol = tol / c.tighten;
    GridSession ts(tc, 2, 0.0, tol / c.tighten, scratch);
    for (long l = lr.lo; l <= lr.hi; ++l) tight.push_back(theorem1_residual(l, c.p, c.q, ts.grid(), zsum_options(c)));
    ts.finish();
    for (const auto& [key, value] : scratch.meta) r.meta.emplace_back("tight_" + key, value);
  }

  double worst_err = 0.0;
  std::int64_t shifts_over = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const ResidualRecord& rec = recs[i];
    worst_err = std::max(worst_err, rec.residual_err);
    std::vector<Cell> row{std::int64_t{rec.l}, rec.a_count, rec.zeros_count, rec.n_terms, rec.z_value, rec.z_err,
                          rec.residual, rec.residual_err,
                          rec.l > 0 ? std::abs(rec.residual) / static_cast<double>(rec.l) : 0.0};
    if (!tight.empty()) {
      const double shift = std::abs(tight[i].residual - rec.residual);
      if (shift >= rec.residual_err) ++shifts_over;
      row.insert(row.end(), {tight[i].residual, tight[i].residual_err, shift});
    }
    r.rows.push_back(std::move(row));
  }
  r.add_assertion("residual_err_below_1e-3", worst_err < kResidualErrLimit ? Verdict::pass : Verdict::fail,
                  "largest propagated error " + str(worst_err));
  if (!tight.empty()) {
    r.add_assertion("tightening_within_err", shifts_over ? Verdict::fail : Verdict::pass,
                    std::to_string(shifts_over) + " rows moved by at least their own error bound");
  }
  r.meta.emplace_back("note", "the limit of r(l)/l is open and is reported, not asserted");
}

void run_theorem2(const RunConfig& c, Report& r) {
  const double tol = tol_of(c);
  const LRange lr = default_range(c);
  input(r, "k", str(c.k));
  input(r, "l_range", str(lr.lo) + ".." + str(lr.hi));
  input(r, "tol", str(tol));
  input(r, "slack", str(c.slack));
  input(r, "slope_limit", str(c.slope_limit));
  GridSession session(c, c.k, 0.0, tol, r);
  const Theorem2Table t = theorem2_series(c.k, lr.lo, lr.hi, session.grid(), zsum_options(c), c.slack, c.slope_limit);
  session.finish();
  r.columns = {"l", "z", "err", "running_max"};
  for (const auto& row : t.rows) r.rows.push_back({std::int64_t{row.l}, row.z, row.err, row.running_max});
  r.add_assertion("bounded_proxy", t.bounded,
                  "max |Z| over l > " + str(t.split_l) + " = " + str(t.late_max) + " vs earlier max " +
                      str(t.early_max) + " + " + str(t.slack));
  r.add_assertion("slope_proxy", t.slope_verdict,
                  "least-squares slope of |Z| " + str(t.slope) + " +- " + str(t.slope_err) + " vs limit " +
                      str(t.slope_limit));
  r.meta.emplace_back("note", "property-based proxy: the implied O(1) constant is not stated, thresholds are conventions");
}

void run_os_check(const RunConfig& c, Report& r) {
  const double tol = tol_of(c);
  const LRange lr = default_range(c);
  input(r, "k", str(c.k));
  input(r, "p", str(c.p));
  input(r, "q", str(c.q));
  input(r, "sigma0", str(c.sigma0));
  input(r, "l_range", str(lr.lo) + ".." + str(lr.hi));
  input(r, "tol", str(tol));
  input(r, "ref_l", str(c.ref_l));
  input(r, "ratio", str(c.ratio));
  input(r, "threshold", str(c.threshold));
  GridSession session(c, c.k, c.sigma0, tol, r);
  const OsTable t =
      os_check(c.sigma0, c.k, c.p, c.q, lr.lo, lr.hi, session.grid(), zsum_options(c), c.ref_l, c.ratio, c.threshold);
  session.finish();
  r.columns = {"l", "z", "err", "z_over_l", "z_over_l_err"};
  for (const auto& row : t.rows) r.rows.push_back({std::int64_t{row.l}, row.z, row.err, row.normalized, row.normalized_err});
  r.add_assertion("normalized_decay", t.verdict,
                  "|Z/l| at l=" + str(lr.hi) + " below " + str(t.ratio) + " x its value at l=" + str(t.reference_l) +
                      " and below " + str(t.threshold));
}

void run_diag(const RunConfig& c, Report& r) {
  input(r, "kind", c.kind);
  if (c.kind == "em-bound") {
    input(r, "k", str(c.k));
    input(r, "p", str(c.p));
    input(r, "q", str(c.q));
    input(r, "l", str(*c.l));
    input(r, "B", str(c.bound_constant));
    const EmBoundScan s = em_bound_sum(*c.l, c.k, c.p, c.q, c.bound_constant, c.prec_bits);
    r.columns = {"m", "abs_sin_lower", "abs_sin_upper", "bound_lower", "bound_upper", "capped", "verdict"};
    for (const auto& t : s.terms) {
      if (!t.emitted) {
        r.meta.emplace_back("note", t.note);
        continue;
      }
      r.rows.push_back({std::int64_t{t.m}, t.sin.abs_sin.lo, t.sin.abs_sin.hi, t.bound.lo, t.bound.hi,
                        std::int64_t{t.capped ? 1 : 0}, std::string(to_string(t.verdict))});
    }
    r.meta.emplace_back("total_lower", str(s.total.lo));
    r.meta.emplace_back("total_upper", str(s.total.hi));
    r.add_assertion("em_bound_certified", s.verdict, "every term enclosed with the Jordan check");
    r.meta.emplace_back("note", "B stands in for an unstated constant; read the table as a family over B");
  } else if (c.kind == "sawtooth") {
    input(r, "y", c.y);
    input(r, "k_max", str(c.k_max));
    const ParsedPoint pt = parse_point(c.y, c.prec_bits);
    const SawtoothReport s = sawtooth_partial_sum_check(pt.y, c.k_max);
    r.columns = {"y", "k_max", "checked", "worst_ratio", "worst_k", "first_failure", "first_undecided"};
    r.rows.push_back({pt.label, std::int64_t{s.k_max}, std::int64_t{s.checked}, s.worst_ratio,
                      std::int64_t{s.worst_k}, std::int64_t{s.first_failure}, std::int64_t{s.first_undecided}});
    r.add_assertion("sawtooth_bound", s.verdict, s.note.empty() ? "bound holds for every K <= k_max" : s.note);
  } else if (c.kind == "ridout") {
    input(r, "k", str(c.k));
    input(r, "p", str(c.p));
    input(r, "q", str(c.q));
    input(r, "m_max", str(c.m_max));
    const RidoutTable t = ridout_exponent_scan(c.k, c.p, c.q, c.m_max, c.prec_bits);
    r.columns = {"m", "distance_lower", "distance_upper", "exponent_lower", "exponent_upper"};
    for (const auto& row : t.rows) {
      r.rows.push_back({std::int64_t{row.m}, row.distance.lo, row.distance.hi, row.exponent.lo, row.exponent.hi});
    }
    r.meta.emplace_back("tail_max", str(t.tail_max));
    r.meta.emplace_back("tail_argmax", str(t.tail_argmax));
    r.add_assertion("exponents_positive_finite", t.positive_finite ? Verdict::pass : Verdict::undecided,
                    "empirical only; the underlying theorem is ineffective", false);
  } else if (c.kind == "convexity") {
    const double tol = tol_of(c);
    input(r, "sigma0", str(c.sigma0));
    input(r, "t_range", str(c.t_min) + ".." + str(c.t_max));
    input(r, "samples", std::to_string(c.samples));
    input(r, "tol", str(tol));
    const auto grid = log_spaced(c.t_min, c.t_max, c.samples);
    const ConvexityReport s = convexity_check(c.sigma0, grid, tol);
    r.columns = {"t", "abs_zeta", "err", "bound", "ratio"};
    for (const auto& row : s.rows) r.rows.push_back({row.t, row.abs_zeta, row.err, row.bound, row.ratio});
    r.meta.emplace_back("sup_ratio", str(s.sup_ratio));
    r.add_assertion("convexity_constant_stable", s.verdict,
                    "top-decade sup " + str(s.top_decade_sup) + " vs earlier sup " + str(s.below_sup) +
                        (s.note.empty() ? "" : "; " + s.note));
  } else if (c.kind == "chi") {
    const double tol = tol_of(c);
    input(r, "sigma0", str(c.sigma0));
    input(r, "t_range", str(c.t_min) + ".." + str(c.t_max));
    input(r, "samples", std::to_string(c.samples));
    const auto grid = log_spaced(c.t_min, c.t_max, c.samples);
    const ChiAsymptoticReport s = chi_asymptotic_check(grid, c.sigma0, tol);
    r.columns = {"t", "skipped", "deviation", "deviation_err", "scaled"};
    for (const auto& row : s.rows) {
      r.rows.push_back({row.t, std::int64_t{row.skipped ? 1 : 0}, row.deviation, row.deviation_err, row.scaled});
    }
    r.meta.emplace_back("max_scaled", str(s.max_scaled));
    r.add_assertion("chi_asymptotic_order", s.verdict, s.note.empty() ? "deviation decays like 1/t" : s.note);
  } else {
    const double tol = tol_of(c);
    input(r, "t_range", str(c.t_min) + ".." + str(c.t_max));
    input(r, "samples", std::to_string(c.samples));
    input(r, "tol", str(tol));
    const auto grid = log_spaced(c.t_min, c.t_max, c.samples);
    const FunctionalEquationReport s = selfcheck_functional_equation(grid, tol);
    r.columns = {"t", "direct_re", "direct_im", "direct_err", "fe_re", "fe_im", "fe_err", "residual", "budget", "verdict"};
    for (const auto& row : s.samples) {
      r.rows.push_back({row.t, row.direct.re, row.direct.im, row.direct.err, row.via_fe.re, row.via_fe.im,
                        row.via_fe.err, row.residual, row.budget, std::string(to_string(row.verdict))});
    }
    r.add_assertion("functional_equation", s.verdict, "max residual " + str(s.max_residual));
  }
}

void describe_cache(const CacheFile& f, Report& r) {
  r.columns = {"k", "sigma0", "tol", "evaluator", "rows", "n_min", "n_max", "max_err"};
  double max_err = 0.0;
  for (const auto& [n, z] : f.rows) max_err = std::max(max_err, z.err);
  const std::int64_t n_min = f.rows.empty() ? 0 : f.rows.begin()->first;
  const std::int64_t n_max = f.rows.empty() ? 0 : f.rows.rbegin()->first;
  r.rows.push_back({std::int64_t{f.header.k}, f.header.sigma0, f.header.tol, f.header.evaluator,
                    static_cast<std::int64_t>(f.rows.size()), n_min, n_max, max_err});
}

void run_cache(const RunConfig& c, Report& r) {
  input(r, "action", c.cache_action);
  input(r, "cache", c.cache_path);
  if (c.cache_action == "info") {
    const CacheFile f = read_cache(c.cache_path);
    describe_cache(f, r);
    r.add_assertion("cache_valid", Verdict::pass, "header and rows validated");
    return;
  }
  std::optional<CacheFile> acc;
  if (std::filesystem::exists(c.cache_path)) acc = read_cache(c.cache_path);
  for (const auto& in : c.cache_inputs) {
    input(r, "merge_input", in);
    const CacheFile f = read_cache(in);
    acc = acc ? merge(*acc, f) : f;
  }
  write_cache(c.cache_path, *acc);
  describe_cache(*acc, r);
  r.add_assertion("cache_merged", Verdict::pass, std::to_string(c.cache_inputs.size()) + " inputs merged");
}

void dispatch(const RunConfig& c, Report& r) {
  switch (c.subcommand) {
    case Subcommand::digits: return run_digits(c, r);
    case Subcommand::frac_sum: return run_frac_sum(c, r);
    case Subcommand::h_verify:
      input(r, "check", c.check);
      if (c.check == "key-sum") return run_h_key_sum(c, r);
      if (c.check == "numberof1") return run_h_numberof1(c, r);
      return run_h_binary(c, r);
    case Subcommand::zeta: return run_zeta(c, r);
    case Subcommand::zsum: return run_zsum(c, r);
    case Subcommand::residual: return run_residual(c, r);
    case Subcommand::theorem2: return run_theorem2(c, r);
    case Subcommand::os_check: return run_os_check(c, r);
    case Subcommand::diag: return run_diag(c, r);
    case Subcommand::cache: return run_cache(c, r);
  }
}

RunResult failure(RunResult res, int code, const std::string& cause, const std::string& what) {
  res.exit_code = code;
  res.diagnostic = cause + ": " + what;
  res.report.meta.emplace_back("failure", res.diagnostic);
  res.report.add_assertion("computation", Verdict::undecided, res.diagnostic);
  return res;
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult res;
  res.report.subcommand = subcommand_name(config.subcommand);
  if (auto why = validate(config)) {
    res.exit_code = kExitInvalid;
    res.diagnostic = "invalid configuration: " + *why;
    return res;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    dispatch(config, res.report);
  } catch (const PreconditionError& e) {
    return failure(std::move(res), kExitInvalid, "invalid configuration", e.what());
  } catch (const ToleranceError& e) {
    return failure(std::move(res), kExitUndecided, "tolerance not reached", e.what());
  } catch (const BudgetError& e) {
    return failure(std::move(res), kExitUndecided, "resource budget exceeded", e.what());
  } catch (const CacheError& e) {
    return failure(std::move(res), kExitUndecided, "cache refused", e.what());
  } catch (const std::exception& e) {
    return failure(std::move(res), kExitUndecided, "computation failed", e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.report.meta.emplace_back("threads", std::to_string(config.threads));
  res.report.meta.emplace_back("reduction", config.deterministic ? "deterministic" : "fast");
  res.report.meta.emplace_back("wall_seconds", format_double(secs));
  switch (res.report.overall()) {
    case Verdict::pass: res.exit_code = kExitPass; break;
    case Verdict::fail: res.exit_code = kExitFailed; break;
    case Verdict::undecided:
      res.exit_code = kExitUndecided;
      res.diagnostic = "undecided: at least one hard assertion could not be decided";
      break;
  }
  return res;
}

void emit(const RunConfig& config, const Report& report, std::ostream& fallback) {
  std::ostringstream os;
  if (config.format == OutputFormat::json) {
    write_json(os, report);
  } else {
    write_csv(os, report);
  }
  if (config.out_path.empty()) {
    fallback << os.str();
    return;
  }
  const std::filesystem::path path(config.out_path);
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << os.str();
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace zetaprog
