#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "zetaprog/cache_file.hpp"
#include "zetaprog/cli.hpp"

using namespace zetaprog;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zprog_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::string csv(const Report& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

CacheFile sample_cache(std::int64_t from, std::int64_t to, double err) {
  CacheFile f;
  f.header.k = 2;
  f.header.sigma0 = 0.0;
  f.header.tol = 1e-6;
  for (std::int64_t n = from; n <= to; ++n) {
    f.rows[n] = {1.0 / static_cast<double>(n), -0.1 * static_cast<double>(n), err};
  }
  return f;
}

}  // namespace

TEST_CASE("digits example") {
  RunConfig c;
  c.subcommand = Subcommand::digits;
  c.k = 2;
  c.p = 1;
  c.q = 2;
  c.l = 4;
  c.a = 1;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  REQUIRE(r.report.rows.size() == 1);
  CHECK(std::get<std::int64_t>(r.report.rows[0][1]) == 3);
  CHECK(csv_body(r.report) == "a,count\n1,3\n");
}

TEST_CASE("zeta at zero") {
  RunConfig c;
  c.subcommand = Subcommand::zeta;
  c.sigma0 = 0.0;
  c.t = 0.0;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(std::get<double>(r.report.rows[0][2]) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(csv(r.report).find("-0.5,") != std::string::npos);
}

TEST_CASE("h-verify key-sum scan passes") {
  RunConfig c;
  c.subcommand = Subcommand::h_verify;
  c.k = 2;
  c.q = 2;
  c.x_max = 10000;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report.rows.size() == 9999);
  for (const auto& a : r.report.assertions) CHECK(a.verdict == Verdict::pass);
}

TEST_CASE("h-verify other checks") {
  RunConfig c;
  c.subcommand = Subcommand::h_verify;
  c.check = "numberof1";
  c.l_min = 0;
  c.l_max = 12;
  CHECK(run(c).exit_code == kExitPass);
  c.check = "binary";
  c.l_min = 1;
  c.l_max = 50;
  c.p = 2;
  c.q = 3;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report.rows.size() == 50);
}

TEST_CASE("invalid configurations fail fast with status 2") {
  RunConfig c;
  c.subcommand = Subcommand::zeta;
  c.sigma0 = 1.0;
  RunResult r = run(c);
  CHECK(r.exit_code == kExitInvalid);
  CHECK(r.diagnostic.find('\n') == std::string::npos);
  CHECK(r.report.rows.empty());

  c.subcommand = Subcommand::digits;
  c.k = 4;  // perfect square with q = 2
  c.l = 3;
  CHECK(run(c).exit_code == kExitInvalid);

  c = {};
  c.subcommand = Subcommand::residual;
  c.p = 2;
  c.q = 2;
  CHECK(run(c).exit_code == kExitInvalid);

  c = {};
  c.subcommand = Subcommand::theorem2;
  c.l_min = 2;
  c.l_max = 30;
  CHECK(run(c).exit_code == kExitInvalid);

  c = {};
  c.subcommand = Subcommand::diag;
  c.kind = "nope";
  CHECK(run(c).exit_code == kExitInvalid);

  c.kind = "sawtooth";
  c.y = "x/2";
  CHECK(run(c).exit_code == kExitInvalid);

  c = {};
  c.subcommand = Subcommand::zeta;
  c.tol = 1e-20;
  CHECK(run(c).exit_code == kExitInvalid);
}

TEST_CASE("budget failures report status 1 with a cause") {
  RunConfig c;
  c.subcommand = Subcommand::zsum;
  c.k = 10;
  c.l = 9;
  c.no_cache = true;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitUndecided);
  CHECK(r.diagnostic.find("budget") != std::string::npos);
}

TEST_CASE("diagnostics run") {
  RunConfig c;
  c.subcommand = Subcommand::diag;
  c.kind = "sawtooth";
  c.y = "1/3";
  c.k_max = 200;
  CHECK(run(c).exit_code == kExitPass);
  c.y = "pow:2,1,2";
  CHECK(run(c).exit_code == kExitPass);

  c.kind = "ridout";
  c.q = 2;
  c.m_max = 50;
  const RunResult rid = run(c);
  CHECK(rid.exit_code == kExitPass);
  CHECK(rid.report.rows.size() == 50);

  c.kind = "em-bound";
  c.l = 6;
  CHECK(run(c).exit_code == kExitPass);

  c.kind = "fe";
  c.t_min = 1.0;
  c.t_max = 1e3;
  c.samples = 10;
  CHECK(run(c).exit_code == kExitPass);

  c.kind = "chi";
  c.t_min = 100.0;
  c.t_max = 1e4;
  c.samples = 20;
  CHECK(run(c).exit_code == kExitPass);
}

TEST_CASE("json mirrors csv content") {
  RunConfig c;
  c.subcommand = Subcommand::zeta;
  c.sigma0 = 2.0;
  std::ostringstream os;
  write_json(os, run(c).report);
  const std::string j = os.str();
  CHECK(j.find("\"assertions\"") != std::string::npos);
  CHECK(j.find("\"certified_within_tol\"") != std::string::npos);
  CHECK(j.find("\"rows\"") != std::string::npos);
}

TEST_CASE("emit writes the report to a file") {
  TempDir dir;
  RunConfig c;
  c.subcommand = Subcommand::zeta;
  c.sigma0 = 2.0;
  c.out_path = (dir.path / "z.csv").string();
  const RunResult r = run(c);
  std::ostringstream unused;
  emit(c, r.report, unused);
  CHECK(unused.str().empty());
  std::ifstream in(c.out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv(r.report));
}

TEST_CASE("cache round-trip") {
  TempDir dir;
  const fs::path p = dir.path / "c.csv";
  const CacheFile f = sample_cache(1, 300, 1e-9);
  write_cache(p, f);
  const CacheFile g = read_cache(p);
  CHECK(g.header.k == 2);
  CHECK(g.header.tol == f.header.tol);
  CHECK(g.header.evaluator == kEvaluatorVersion);
  REQUIRE(g.rows.size() == f.rows.size());
  for (const auto& [n, z] : f.rows) {
    const ComplexApprox& w = g.rows.at(n);
    CHECK(w.re == z.re);
    CHECK(w.im == z.im);
    CHECK(w.err == z.err);
  }
  // no temporary files are left behind
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
}

TEST_CASE("cache merge") {
  const CacheFile a = sample_cache(1, 10, 1e-8);
  const CacheFile b = sample_cache(21, 30, 1e-8);
  const CacheFile u = merge(a, b);
  CHECK(u.rows.size() == 20);
  std::int64_t prev = 0;
  for (const auto& [n, z] : u.rows) {
    CHECK(n > prev);
    prev = n;
  }
  // overlapping rows keep the smaller error
  CacheFile c = sample_cache(5, 15, 1e-10);
  c.rows[5].re = 42.0;
  const CacheFile m = merge(a, c);
  CHECK(m.rows.size() == 15);
  CHECK(m.rows.at(5).re == 42.0);
  CHECK(m.rows.at(5).err == 1e-10);
  CHECK(merge(c, a).rows.at(5).re == 42.0);

  CacheFile other = sample_cache(1, 3, 1e-8);
  other.header.sigma0 = 0.5;
  CHECK_THROWS_AS(merge(a, other), CacheError);
}

TEST_CASE("cache refusals") {
  CacheHeader h;
  h.k = 2;
  h.sigma0 = 0.0;
  h.tol = 1e-6;
  CHECK_FALSE(incompatibility(h, 2, 0.0, 1e-6));
  CHECK_FALSE(incompatibility(h, 2, 0.0, 1e-5));
  const auto loose = incompatibility(h, 2, 0.0, 1e-8);
  REQUIRE(loose);
  CHECK(loose->find("looser") != std::string::npos);
  CHECK(incompatibility(h, 3, 0.0, 1e-6));
  CHECK(incompatibility(h, 2, 0.5, 1e-6));
  h.evaluator = "something-else";
  CHECK(incompatibility(h, 2, 0.0, 1e-6)->find("evaluator") != std::string::npos);

  TempDir dir;
  const fs::path p = dir.path / "bad.csv";
  write_cache(p, sample_cache(1, 5, 1e-9));
  auto rewrite = [&](const std::string& body) {
    std::ofstream out(p, std::ios::trunc);
    out << body;
  };
  const std::string head = "#zetagrid,format=1,k=2,sigma0=0,tol=1e-06,evaluator=em-dd-block256-v1\nn,re,im,err\n";
  rewrite(head + "1,0.5,0.25,1e-9\n2,0.5,abc,1e-9\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite(head + "1,0.5,0.25,1e-9\n1,0.5,0.25,1e-9\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite(head + "2,0.5,0.25,1e-9\n1,0.5,0.25,1e-9\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite(head + "1,0.5,0.25\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite(head + "1,0.5,0.25,1e-3\n");  // err above the header tol
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite("#zetagrid,format=2,k=2,sigma0=0,tol=1e-06,evaluator=em-dd-block256-v1\nn,re,im,err\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  rewrite("garbage\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);

  // a grid refuses the corrupt file without reading any of it
  rewrite(head + "1,0.5,0.25,1e-9\n2,0.5,abc,1e-9\n");
  ZetaGrid grid(2, 0.0, 1e-6);
  const CacheLoad load = load_grid(grid, p);
  CHECK_FALSE(load.used);
  CHECK(load.note.find("refused") != std::string::npos);
  CHECK(grid.entries().empty());
}

TEST_CASE("grid runs reuse the cache and keep bodies identical") {
  TempDir dir;
  RunConfig c;
  c.subcommand = Subcommand::theorem2;
  c.k = 2;
  c.l_min = 2;
  c.l_max = 11;
  c.cache_path = (dir.path / "g.csv").string();
  const RunResult cold = run(c);
  REQUIRE(cold.exit_code == kExitPass);
  const RunResult warm = run(c);
  REQUIRE(warm.exit_code == kExitPass);
  CHECK(csv_body(cold.report) == csv_body(warm.report));
  bool saw_load = false;
  for (const auto& [k, v] : warm.report.meta) {
    if (k == "cache_load") saw_load = v == "loaded";
    if (k == "grid_computed") CHECK(v == "0");
  }
  CHECK(saw_load);

  // a tighter request refuses the looser cache and recomputes
  c.tol = 1e-8;
  const RunResult tight = run(c);
  CHECK(tight.exit_code == kExitPass);
  bool refused = false;
  for (const auto& [k, v] : tight.report.meta) {
    if (k == "cache_load") refused = v.find("looser") != std::string::npos;
  }
  CHECK(refused);

  c.tol.reset();
  c.no_cache = true;
  c.threads = 4;
  CHECK(csv_body(run(c).report) == csv_body(cold.report));
}

TEST_CASE("residual pipeline with tightening") {
  RunConfig c;
  c.subcommand = Subcommand::residual;
  c.p = 1;
  c.q = 3;
  c.l_min = 4;
  c.l_max = 10;
  c.tol = 1e-5;
  c.tighten = 100.0;
  c.no_cache = true;
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report.rows.size() == 7);
  CHECK(r.report.columns.back() == "shift");
}

TEST_CASE("cache subcommand merges files") {
  TempDir dir;
  const fs::path a = dir.path / "a.csv";
  const fs::path b = dir.path / "b.csv";
  write_cache(a, sample_cache(1, 10, 1e-8));
  write_cache(b, sample_cache(11, 20, 1e-8));
  RunConfig c;
  c.subcommand = Subcommand::cache;
  c.cache_action = "merge";
  c.cache_path = (dir.path / "m.csv").string();
  c.cache_inputs = {a.string(), b.string()};
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(read_cache(c.cache_path).rows.size() == 20);
  c.cache_action = "info";
  CHECK(std::get<std::int64_t>(run(c).report.rows[0][4]) == 20);
}
