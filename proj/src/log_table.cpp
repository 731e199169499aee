#include "zetaprog/log_table.hpp"

#include <mpfr.h>

#include <map>
#include <mutex>

namespace zetaprog {

namespace {

constexpr mpfr_prec_t kLogPrec = 128;

DD split(mpfr_t x) {
  const double hi = mpfr_get_d(x, MPFR_RNDN);
  mpfr_sub_d(x, x, hi, MPFR_RNDN);
  return {hi, mpfr_get_d(x, MPFR_RNDN)};
}

// base == 0 selects natural logarithms.
void fill(std::vector<DD>& out, long base, std::uint64_t from, std::uint64_t to) {
  mpfr_t x, lk;
  mpfr_inits2(kLogPrec, x, lk, static_cast<mpfr_ptr>(nullptr));
  if (base != 0) {
    mpfr_set_si(lk, base, MPFR_RNDN);
    mpfr_log(lk, lk, MPFR_RNDN);
  }
  for (std::uint64_t m = from; m <= to; ++m) {
    if (m == 0) {
      out[0] = {};
      continue;
    }
    mpfr_set_ui(x, m, MPFR_RNDN);
    mpfr_log(x, x, MPFR_RNDN);
    if (base != 0) mpfr_div(x, x, lk, MPFR_RNDN);
    out[m] = split(x);
  }
  mpfr_clears(x, lk, static_cast<mpfr_ptr>(nullptr));
}

struct Registry {
  std::mutex mutex;
  std::map<long, LogSnapshot> tables;
};

Registry& registry() {
  static Registry r;
  return r;
}

LogSnapshot shared_table(long base, std::uint64_t n) {
  Registry& reg = registry();
  std::lock_guard lock(reg.mutex);
  LogSnapshot& slot = reg.tables[base];
  if (slot && slot->size() > n) return slot;
  const std::uint64_t old_size = slot ? slot->size() : 0;
  // geometric growth keeps repeated small extensions cheap
  const std::uint64_t new_size = std::max<std::uint64_t>(n + 1, old_size + old_size / 2);
  auto grown = std::make_shared<std::vector<DD>>(new_size);
  if (slot) std::copy(slot->begin(), slot->end(), grown->begin());
  fill(*grown, base, old_size, new_size - 1);
  slot = std::move(grown);
  return slot;
}

}  // namespace

LogSnapshot natural_logs(std::uint64_t n) { return shared_table(0, n); }
LogSnapshot base_logs(long k, std::uint64_t n) { return shared_table(k, n); }

DD log_base_dd(long k, std::uint64_t m) {
  mpfr_t x, lk;
  mpfr_inits2(kLogPrec, x, lk, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(x, m, MPFR_RNDN);
  mpfr_log(x, x, MPFR_RNDN);
  if (k != 0) {
    mpfr_set_si(lk, k, MPFR_RNDN);
    mpfr_log(lk, lk, MPFR_RNDN);
    mpfr_div(x, x, lk, MPFR_RNDN);
  }
  const DD out = split(x);
  mpfr_clears(x, lk, static_cast<mpfr_ptr>(nullptr));
  return out;
}

DD log_dd(std::uint64_t m) { return log_base_dd(0, m); }

}  // namespace zetaprog
