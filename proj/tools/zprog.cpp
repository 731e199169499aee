#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zetaprog/cli.hpp"

using namespace zetaprog;

namespace {

// "a..b" or "a:b".
bool parse_range(const std::string& s, long& lo, long& hi) {
  long a = 0, b = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%ld..%ld%c", &a, &b, &tail) == 2 || std::sscanf(s.c_str(), "%ld:%ld%c", &a, &b, &tail) == 2) {
    lo = a;
    hi = b;
    return true;
  }
  return false;
}

bool given(CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

struct Extras {
  long l = 0;
  std::string l_range;
  long a = 0;
  std::int64_t n = 0;
  double tol = 0.0;
  std::string format = "csv";
  bool fast = false;
};

void add_common(CLI::App* sub, RunConfig& c, Extras& x) {
  sub->add_option("--k", c.k, "base k (digit base for digits)");
  sub->add_option("--p", c.p, "numerator p");
  sub->add_option("--q", c.q, "denominator q");
  sub->add_option("--l", x.l, "single l");
  sub->add_option("--l-range", x.l_range, "l range as a..b");
  sub->add_option("--sigma0", c.sigma0, "real part sigma0");
  sub->add_option("--tol", x.tol, "absolute tolerance per zeta value");
  sub->add_option("--prec", c.prec_bits, "working precision in bits for exact parts");
  sub->add_option("--cache", c.cache_path, "zeta grid cache file");
  sub->add_flag("--no-cache", c.no_cache, "do not read or write a cache");
  sub->add_option("--out", c.out_path, "report path (default stdout)");
  sub->add_option("--format", x.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "worker threads");
  sub->add_flag("--fast", x.fast, "pairwise reduction instead of the deterministic ordered sum");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for digit sums of k^{p/q} and zeta sums along vertical progressions"};
  app.require_subcommand(1);
  RunConfig c;
  Extras x;

  struct Entry {
    const char* name;
    Subcommand sub;
    const char* help;
  };
  const Entry entries[] = {
      {"digits", Subcommand::digits, "count digits of floor(k^{d+p/q}) mod k for d <= l"},
      {"frac-sum", Subcommand::frac_sum, "certified sums of {k^{d+p/q}}"},
      {"h-verify", Subcommand::h_verify, "exact identities for the convolution h"},
      {"zeta", Subcommand::zeta, "certified zeta value"},
      {"zsum", Subcommand::zsum, "progression sum Z(l; p, q, k)"},
      {"residual", Subcommand::residual, "residual pipeline for digit frequencies of 2^{p/q}"},
      {"theorem2", Subcommand::theorem2, "boundedness series of Z(l; 1, 1, k)"},
      {"os-check", Subcommand::os_check, "normalized progression sums off the critical line"},
      {"diag", Subcommand::diag, "diagnostics"},
      {"cache", Subcommand::cache, "inspect or merge zeta grid caches"},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, c, x);
    sub->callback([&c, s = e.sub] { c.subcommand = s; });
    switch (e.sub) {
      case Subcommand::digits: sub->add_option("--a", x.a, "single digit value"); break;
      case Subcommand::h_verify:
        sub->add_option("--check", c.check, "key-sum, numberof1 or binary");
        sub->add_option("--x-max", c.x_max, "largest x for key-sum");
        break;
      case Subcommand::zeta:
        sub->add_option("--t", c.t, "imaginary part");
        sub->add_option("--n", x.n, "progression index: t = 2 pi n / log k");
        break;
      case Subcommand::residual: sub->add_option("--tighten", c.tighten, "rerun at tol / factor and compare"); break;
      case Subcommand::theorem2:
        sub->add_option("--slack", c.slack, "allowed growth of the late maximum");
        sub->add_option("--slope-limit", c.slope_limit, "largest accepted slope of |Z| against l");
        break;
      case Subcommand::os_check:
        sub->add_option("--ref-l", c.ref_l, "reference l (default: start of range)");
        sub->add_option("--ratio", c.ratio, "required shrink factor against the reference");
        sub->add_option("--threshold", c.threshold, "absolute threshold at the last l");
        break;
      case Subcommand::diag:
        sub->add_option("--kind", c.kind, "em-bound, sawtooth, ridout, convexity, chi or fe")->required();
        sub->add_option("--y", c.y, "sawtooth point: a/b or pow:k,p,q");
        sub->add_option("--k-max", c.k_max, "sawtooth partial sums up to K");
        sub->add_option("--m-max", c.m_max, "ridout scan length");
        sub->add_option("--B", c.bound_constant, "stand-in constant for em-bound");
        sub->add_option("--t-min", c.t_min, "smallest t");
        sub->add_option("--t-max", c.t_max, "largest t");
        sub->add_option("--samples", c.samples, "log-spaced sample count");
        break;
      case Subcommand::cache:
        sub->add_option("action", c.cache_action, "info or merge");
        sub->add_option("inputs", c.cache_inputs, "caches to merge into --cache");
        break;
      default: break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "zprog: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  CLI::App* used = app.get_subcommands().front();
  if (given(used, "--l")) c.l = x.l;
  if (given(used, "--l-range")) {
    long lo = 0, hi = 0;
    if (!parse_range(x.l_range, lo, hi)) {
      std::cerr << "zprog: invalid configuration: --l-range '" << x.l_range << "' is not of the form a..b\n";
      return kExitInvalid;
    }
    c.l_min = lo;
    c.l_max = hi;
  }
  if (given(used, "--a")) c.a = x.a;
  if (given(used, "--n")) c.n = x.n;
  if (given(used, "--tol")) c.tol = x.tol;
  c.format = x.format == "json" ? OutputFormat::json : OutputFormat::csv;
  c.deterministic = !x.fast;

  const RunResult res = run(c);
  if (res.exit_code == kExitInvalid && res.report.rows.empty() && res.report.assertions.empty()) {
    std::cerr << "zprog: " << res.diagnostic << '\n';
    return res.exit_code;
  }
  try {
    emit(c, res.report, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "zprog: cannot write report: " << e.what() << '\n';
    return kExitUndecided;
  }
  if (!res.diagnostic.empty()) std::cerr << "zprog: " << res.diagnostic << '\n';
  return res.exit_code;
}
