#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "zetaprog/complex_approx.hpp"
#include "zetaprog/zeta_grid.hpp"

namespace zetaprog {

inline constexpr int kCacheFormatVersion = 1;

struct CacheHeader {
  int format_version = kCacheFormatVersion;
  long k = 2;
  double sigma0 = 0.0;
  double tol = 0.0;
  std::string evaluator = kEvaluatorVersion;
};

/// Persistent grid values. On disk: one '#zetagrid,...' header line, a
/// 'n,re,im,err' column line, then rows strictly ascending in n with
/// 17-digit decimals.
struct CacheFile {
  CacheHeader header;
  std::map<std::int64_t, ComplexApprox> rows;
};

/// Reads and validates a cache; any malformed line rejects the whole file.
CacheFile read_cache(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it into place.
void write_cache(const std::filesystem::path& path, const CacheFile& cache);

/// Union by n; on conflicts the entry with the smaller err wins. Headers must agree
/// on k, sigma0 and evaluator; the merged tol is the looser of the two.
CacheFile merge(const CacheFile& a, const CacheFile& b);

/// Empty when the cache may serve a grid at (k, sigma0, tol); otherwise the reason it may not.
std::optional<std::string> incompatibility(const CacheHeader& h, long k, double sigma0, double tol);

/// $ZPROG_CACHE_DIR/zetagrid_k<k>_s<sigma0>_t<tol>.csv, or nullopt when the variable is unset.
std::optional<std::filesystem::path> default_cache_path(long k, double sigma0, double tol);

struct CacheLoad {
  bool used = false;
  std::int64_t rows = 0;
  std::string note;  // refusal reason or "absent"
};

/// Loads a compatible cache into the grid. Refusals are reported, not thrown.
CacheLoad load_grid(ZetaGrid& grid, const std::filesystem::path& path);
/// Merges the grid into the file at path (creating it), refusing incompatible files.
void save_grid(const ZetaGrid& grid, const std::filesystem::path& path);

}  // namespace zetaprog
