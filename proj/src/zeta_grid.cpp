#include "zetaprog/zeta_grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "zetaprog/log_table.hpp"

namespace zetaprog {

namespace {

constexpr double u = kUnitRoundoff;

using v8 = double __attribute__((vector_size(64)));
constexpr int kVecs = 2;
constexpr int kLanes = 8 * kVecs;
constexpr std::int64_t kTile = 256;

// Tables over m < n_terms shared by every block of one ensure() call.
struct Tables {
  LogSnapshot logk;
  std::vector<double> amp;       // m^{-sigma}
  std::vector<double> amp_sum;   // prefix sums of amp, amp_sum[N] = sum_{m<N}
  std::vector<double> step_re;   // e^{-2 pi i log_k m}
  std::vector<double> step_im;
};

Tables build_tables(long k, double sigma0, std::int64_t n_terms) {
  Tables t;
  const auto size = static_cast<std::size_t>(n_terms) + 1;
  t.logk = base_logs(k, size);
  const LogSnapshot ln = natural_logs(size);
  t.amp.resize(size);
  t.amp_sum.assign(size + 1, 0.0);
  t.step_re.resize(size);
  t.step_im.resize(size);
  for (std::size_t m = 1; m < size; ++m) {
    t.amp[m] = sigma0 == 0.0 ? 1.0 : std::exp(-sigma0 * (*ln)[m].hi);
    t.amp_sum[m + 1] = t.amp_sum[m] + t.amp[m];
    double f = frac((*t.logk)[m]);
    if (f > 0.5) f -= 1.0;
    const double theta = kTwoPi.hi * f;
    t.step_re[m] = std::cos(theta);
    t.step_im[m] = -std::sin(theta);
  }
  return t;
}

// 2 pi {n log_k m} folded to [-pi, pi].
inline double progression_phase(double n, const DD& logk_m) {
  double f = frac(n * logk_m);
  if (f > 0.5) f -= 1.0;
  return kTwoPi.hi * f;
}

std::int64_t block_terms(long k, double sigma0, double tol, std::int64_t block, const ZetaLimits& limits) {
  const double top = 2.0 * std::numbers::pi * static_cast<double>((block + 1) * kGridBlock) /
                     std::log(static_cast<double>(k));
  return choose_em_params(sigma0, top, tol, limits).n_terms;
}

std::vector<ComplexApprox> evaluate_block(long k, double sigma0, double tol, std::int64_t block,
                                          const ZetaLimits& limits, const Tables& tab) {
  const std::int64_t n_first = block * kGridBlock + 1;
  const std::int64_t n_terms = block_terms(k, sigma0, tol, block, limits);
  if (static_cast<std::int64_t>(tab.amp.size()) <= n_terms) throw std::logic_error("grid tables too short");
  const std::vector<DD>& logk = *tab.logk;
  const double amp_total = tab.amp_sum[static_cast<std::size_t>(n_terms)] * (1.0 + 1e-12);

  // Per-term head error in units of u * m^{-sigma}: anchor phase and trig (12),
  // 16 per recurrence step, 40 for the plain in-tile sums, amplitude rounding.
  const double log_n = std::log(static_cast<double>(n_terms));
  const double phase_tail = 2.0 * std::numbers::pi * static_cast<double>(n_first + kGridBlock) * logk[static_cast<std::size_t>(n_terms)].hi * 0x1p-97 / u;
  const double base_coeff = 52.0 + phase_tail + (sigma0 == 0.0 ? 0.0 : 2.0 * (2.0 + sigma0 * log_n));
  int sub = static_cast<int>(kGridBlock);
  while (sub > 1 && (base_coeff + 16.0 * (sub - 1)) * u * amp_total > tol / 4.0) sub /= 2;
  const double head_coeff = base_coeff + 16.0 * (sub - 1);

  std::vector<DD> head_re(kGridBlock), head_im(kGridBlock);
  std::vector<v8> acc_re(static_cast<std::size_t>(sub) * kVecs), acc_im(acc_re.size());
  for (std::int64_t tile = 1; tile < n_terms; tile += kTile) {
    const std::int64_t tile_end = std::min(tile + kTile, n_terms);
    for (int s0 = 0; s0 < kGridBlock; s0 += sub) {
      const double anchor_n = static_cast<double>(n_first + s0);
      std::fill(acc_re.begin(), acc_re.end(), v8{});
      std::fill(acc_im.begin(), acc_im.end(), v8{});
      for (std::int64_t m0 = tile; m0 < tile_end; m0 += kLanes) {
        v8 zr[kVecs], zi[kVecs], wr[kVecs], wi[kVecs];
        for (int v = 0; v < kVecs; ++v) {
          for (int l = 0; l < 8; ++l) {
            const std::int64_t m = m0 + 8 * v + l;
            if (m < tile_end) {
              const auto mi = static_cast<std::size_t>(m);
              const double theta = progression_phase(anchor_n, logk[mi]);
              zr[v][l] = tab.amp[mi] * std::cos(theta);
              zi[v][l] = -tab.amp[mi] * std::sin(theta);
              wr[v][l] = tab.step_re[mi];
              wi[v][l] = tab.step_im[mi];
            } else {
              zr[v][l] = 0.0;
              zi[v][l] = 0.0;
              wr[v][l] = 1.0;
              wi[v][l] = 0.0;
            }
          }
        }
        for (int j = 0; j < sub; ++j) {
          v8* ar = &acc_re[static_cast<std::size_t>(j) * kVecs];
          v8* ai = &acc_im[static_cast<std::size_t>(j) * kVecs];
#pragma GCC unroll 4
          for (int v = 0; v < kVecs; ++v) {
            ar[v] += zr[v];
            ai[v] += zi[v];
            const v8 nr = zr[v] * wr[v] - zi[v] * wi[v];
            const v8 ni = zr[v] * wi[v] + zi[v] * wr[v];
            zr[v] = nr;
            zi[v] = ni;
          }
        }
      }
      for (int j = 0; j < sub; ++j) {
        const v8* ar = &acc_re[static_cast<std::size_t>(j) * kVecs];
        const v8* ai = &acc_im[static_cast<std::size_t>(j) * kVecs];
        v8 sr = ar[0], si = ai[0];
        for (int v = 1; v < kVecs; ++v) {
          sr += ar[v];
          si += ai[v];
        }
        const double r = ((sr[0] + sr[1]) + (sr[2] + sr[3])) + ((sr[4] + sr[5]) + (sr[6] + sr[7]));
        const double i = ((si[0] + si[1]) + (si[2] + si[3])) + ((si[4] + si[5]) + (si[6] + si[7]));
        head_re[static_cast<std::size_t>(s0 + j)] = head_re[static_cast<std::size_t>(s0 + j)] + DD{r, 0.0};
        head_im[static_cast<std::size_t>(s0 + j)] = head_im[static_cast<std::size_t>(s0 + j)] + DD{i, 0.0};
      }
    }
  }

  const double tiles = std::ceil(static_cast<double>(n_terms) / kTile);
  const double head_err = (head_coeff * u + 4.0 * u * u * tiles) * amp_total;
  const double scale = 2.0 * std::numbers::pi / std::log(static_cast<double>(k));
  std::vector<ComplexApprox> out(kGridBlock);
  for (std::int64_t i = 0; i < kGridBlock; ++i) {
    const std::int64_t n = n_first + i;
    const double t = scale * static_cast<double>(n);
    const EmParams p = choose_em_params(sigma0, t, tol, limits, 0.0, n_terms);
    const auto nd = static_cast<double>(n);
    const DD& lk_n = logk[static_cast<std::size_t>(n_terms)];
    const double theta = progression_phase(nd, lk_n);
    const double theta_err = 16.0 * u + std::abs(nd * lk_n.hi) * 0x1p-97;
    const EmTail tail = em_tail(sigma0, t, n_terms, p.bernoulli_order, theta, theta_err);
    const std::complex<double> h(to_double(head_re[static_cast<std::size_t>(i)]),
                                 to_double(head_im[static_cast<std::size_t>(i)]));
    const std::complex<double> v = h + tail.value;
    const double err = detail::round_up(p.remainder_bound + head_err + tail.rounding +
                                        2.0 * u * (std::abs(h.real()) + std::abs(h.imag())) +
                                        u * (std::abs(v.real()) + std::abs(v.imag())));
    if (err > tol) {
      throw ToleranceError("grid point n=" + std::to_string(n) + ": certified error exceeds tolerance at N=" +
                           std::to_string(n_terms));
    }
    out[static_cast<std::size_t>(i)] = from_value(v, err);
  }
  return out;
}

void check_grid_args(long k, double sigma0, double tol) {
  if (k < 2) throw PreconditionError("grid base k must be >= 2");
  if (!(sigma0 >= 0.0)) throw PreconditionError("grid sigma0 must be >= 0");
  if (!(tol >= 1e-14)) throw PreconditionError("grid tolerance must be >= 1e-14");
}

}  // namespace

std::vector<ComplexApprox> zeta_grid_block(long k, double sigma0, double tol, std::int64_t block,
                                           const ZetaLimits& limits) {
  check_grid_args(k, sigma0, tol);
  if (block < 0) throw PreconditionError("grid block index must be >= 0");
  const Tables tab = build_tables(k, sigma0, block_terms(k, sigma0, tol, block, limits));
  return evaluate_block(k, sigma0, tol, block, limits, tab);
}

ZetaGrid::ZetaGrid(long k, double sigma0, double tol) : k_(k), sigma0_(sigma0), tol_(tol) {
  check_grid_args(k, sigma0, tol);
}

const ComplexApprox& ZetaGrid::at(std::int64_t n) const {
  const auto it = entries_.find(n);
  if (it == entries_.end()) throw std::out_of_range("grid has no entry for n=" + std::to_string(n));
  return it->second;
}

void ZetaGrid::insert(std::int64_t n, const ComplexApprox& z) {
  if (n < 1) throw PreconditionError("grid entries need n >= 1");
  if (!(z.err <= tol_)) throw PreconditionError("grid entry n=" + std::to_string(n) + " exceeds grid tolerance");
  entries_[n] = z;
}

void ZetaGrid::ensure(std::int64_t n_max, const GridOptions& options) {
  std::vector<std::int64_t> blocks;
  for (std::int64_t b = 0; b * kGridBlock < n_max; ++b) {
    const std::int64_t lo = b * kGridBlock + 1;
    const std::int64_t hi = std::min(n_max, lo + kGridBlock - 1);
    const auto first = entries_.lower_bound(lo);
    const auto last = entries_.upper_bound(hi);
    const auto present = static_cast<std::int64_t>(std::distance(first, last));
    stats_.hits += present;
    if (present < hi - lo + 1) blocks.push_back(b);
  }
  if (blocks.empty()) return;

  const Tables tab = build_tables(k_, sigma0_, block_terms(k_, sigma0_, tol_, blocks.back(), options.limits));
  std::vector<std::vector<ComplexApprox>> results(blocks.size());
  // most expensive blocks first so the pool drains evenly
  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> done{0};
  std::mutex fail_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= blocks.size()) return;
      const std::size_t idx = blocks.size() - 1 - slot;
      try {
        results[idx] = evaluate_block(k_, sigma0_, tol_, blocks[idx], options.limits, tab);
      } catch (...) {
        std::lock_guard lock(fail_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks.size());
        return;
      }
      const std::int64_t d = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(fail_mutex);
        options.progress(d, static_cast<std::int64_t>(blocks.size()));
      }
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::int64_t lo = blocks[i] * kGridBlock + 1;
    for (std::int64_t j = 0; j < kGridBlock; ++j) {
      if (entries_.emplace(lo + j, results[i][static_cast<std::size_t>(j)]).second && lo + j <= n_max) {
        ++stats_.computed;
      }
    }
  }
}

}  // namespace zetaprog
