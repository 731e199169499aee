#include "zetaprog/cache_file.hpp"

#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "zetaprog/report.hpp"

namespace zetaprog {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty()) throw CacheError(where + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw CacheError(where + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw CacheError(where + ": bad integer '" + s + "'");
  return v;
}

CacheHeader parse_header(const std::string& line, const std::string& where) {
  const auto fields = split(line, ',');
  if (fields.empty() || fields[0] != "#zetagrid") throw CacheError(where + ": missing #zetagrid header");
  CacheHeader h;
  bool seen_format = false, seen_k = false, seen_sigma = false, seen_tol = false, seen_eval = false;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string::npos) throw CacheError(where + ": malformed header field '" + fields[i] + "'");
    const std::string key = fields[i].substr(0, eq);
    const std::string val = fields[i].substr(eq + 1);
    if (key == "format") {
      h.format_version = static_cast<int>(parse_int(val, where));
      seen_format = true;
    } else if (key == "k") {
      h.k = static_cast<long>(parse_int(val, where));
      seen_k = true;
    } else if (key == "sigma0") {
      h.sigma0 = parse_double(val, where);
      seen_sigma = true;
    } else if (key == "tol") {
      h.tol = parse_double(val, where);
      seen_tol = true;
    } else if (key == "evaluator") {
      h.evaluator = val;
      seen_eval = true;
    } else {
      throw CacheError(where + ": unknown header field '" + key + "'");
    }
  }
  if (!(seen_format && seen_k && seen_sigma && seen_tol && seen_eval)) throw CacheError(where + ": incomplete header");
  if (h.format_version != kCacheFormatVersion) {
    throw CacheError(where + ": format version " + std::to_string(h.format_version) + " unsupported (expected " +
                     std::to_string(kCacheFormatVersion) + ")");
  }
  return h;
}

std::string header_line(const CacheHeader& h) {
  return "#zetagrid,format=" + std::to_string(h.format_version) + ",k=" + std::to_string(h.k) +
         ",sigma0=" + format_double(h.sigma0) + ",tol=" + format_double(h.tol) + ",evaluator=" + h.evaluator;
}

}  // namespace

CacheFile read_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CacheError(path.string() + ": cannot open");
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw CacheError(where + ": empty file");
  CacheFile cache;
  cache.header = parse_header(line, where);
  if (!std::getline(in, line) || line != "n,re,im,err") throw CacheError(where + ": missing column line");
  std::int64_t prev = 0;
  std::int64_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string at = where + ":" + std::to_string(line_no);
    const auto f = split(line, ',');
    if (f.size() != 4) throw CacheError(at + ": expected 4 fields");
    const std::int64_t n = parse_int(f[0], at);
    if (n <= prev) throw CacheError(at + ": rows must be strictly ascending in n");
    prev = n;
    const ComplexApprox z{parse_double(f[1], at), parse_double(f[2], at), parse_double(f[3], at)};
    if (!(z.err >= 0.0) || !std::isfinite(z.err)) throw CacheError(at + ": err must be finite and non-negative");
    if (z.err > cache.header.tol) throw CacheError(at + ": err exceeds the header tolerance");
    cache.rows.emplace(n, z);
  }
  return cache;
}

void write_cache(const std::filesystem::path& path, const CacheFile& cache) {
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string tmpl = (dir / (path.filename().string() + ".tmp.XXXXXX")).string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  const int fd = ::mkstemp(buf.data());
  if (fd < 0) throw CacheError(path.string() + ": cannot create temporary file: " + std::strerror(errno));
  const std::string tmp(buf.data());
  // mkstemp creates 0600; give the final file ordinary permissions
  const mode_t mask = ::umask(0);
  ::umask(mask);
  ::fchmod(fd, 0666 & ~mask);
  FILE* f = ::fdopen(fd, "w");
  if (f == nullptr) {
    ::close(fd);
    std::filesystem::remove(tmp, ec);
    throw CacheError(path.string() + ": fdopen failed");
  }
  std::string out = header_line(cache.header) + "\nn,re,im,err\n";
  bool ok = std::fputs(out.c_str(), f) >= 0;
  for (const auto& [n, z] : cache.rows) {
    if (!ok) break;
    out = std::to_string(n) + ',' + format_double(z.re) + ',' + format_double(z.im) + ',' + format_double(z.err) + '\n';
    ok = std::fputs(out.c_str(), f) >= 0;
  }
  ok = (std::fflush(f) == 0) && ok;
  ok = (::fsync(fd) == 0) && ok;
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) {
    std::filesystem::remove(tmp, ec);
    throw CacheError(path.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw CacheError(path.string() + ": rename failed");
  }
}

CacheFile merge(const CacheFile& a, const CacheFile& b) {
  if (a.header.k != b.header.k || a.header.sigma0 != b.header.sigma0 || a.header.evaluator != b.header.evaluator ||
      a.header.format_version != b.header.format_version) {
    throw CacheError("cannot merge caches with different k, sigma0, evaluator or format");
  }
  CacheFile out = a;
  out.header.tol = std::max(a.header.tol, b.header.tol);
  for (const auto& [n, z] : b.rows) {
    const auto [it, inserted] = out.rows.emplace(n, z);
    if (!inserted && z.err < it->second.err) it->second = z;
  }
  return out;
}

std::optional<std::string> incompatibility(const CacheHeader& h, long k, double sigma0, double tol) {
  if (h.evaluator != kEvaluatorVersion) {
    return "evaluator version '" + h.evaluator + "' differs from '" + kEvaluatorVersion + "'";
  }
  if (h.k != k) return "cache k=" + std::to_string(h.k) + " but run needs k=" + std::to_string(k);
  if (h.sigma0 != sigma0) return "cache sigma0=" + format_double(h.sigma0) + " but run needs " + format_double(sigma0);
  if (h.tol > tol) {
    return "cache tol=" + format_double(h.tol) + " is looser than the requested " + format_double(tol);
  }
  return std::nullopt;
}

std::optional<std::filesystem::path> default_cache_path(long k, double sigma0, double tol) {
  const char* dir = std::getenv("ZPROG_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  char name[160];
  std::snprintf(name, sizeof name, "zetagrid_k%ld_s%.17g_t%.17g.csv", k, sigma0, tol);
  return std::filesystem::path(dir) / name;
}

CacheLoad load_grid(ZetaGrid& grid, const std::filesystem::path& path) {
  CacheLoad res;
  if (!std::filesystem::exists(path)) {
    res.note = "absent";
    return res;
  }
  CacheFile cache;
  try {
    cache = read_cache(path);
  } catch (const CacheError& e) {
    res.note = std::string("refused: ") + e.what();
    return res;
  }
  if (const auto why = incompatibility(cache.header, grid.k(), grid.sigma0(), grid.tol())) {
    res.note = "refused: " + *why;
    return res;
  }
  for (const auto& [n, z] : cache.rows) {
    if (!grid.contains(n)) grid.insert(n, z);
  }
  res.used = true;
  res.rows = static_cast<std::int64_t>(cache.rows.size());
  res.note = "loaded";
  return res;
}

void save_grid(const ZetaGrid& grid, const std::filesystem::path& path) {
  CacheFile fresh;
  fresh.header.k = grid.k();
  fresh.header.sigma0 = grid.sigma0();
  fresh.header.tol = grid.tol();
  fresh.rows = grid.entries();
  if (std::filesystem::exists(path)) {
    const CacheFile old = read_cache(path);
    if (const auto why = incompatibility(old.header, grid.k(), grid.sigma0(), grid.tol())) {
      throw CacheError(path.string() + ": refusing to overwrite: " + *why);
    }
    // the stored tol is at most ours, so every stored row also meets ours
    CacheFile merged = merge(fresh, old);
    merged.header.tol = grid.tol();
    write_cache(path, merged);
    return;
  }
  write_cache(path, fresh);
}

}  // namespace zetaprog
