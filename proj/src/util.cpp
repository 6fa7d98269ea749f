#include "mce/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mce {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double frac01(double x) {
  double f = x - std::floor(x);
  return (f < 1.0) ? f : 0.0;
}

std::vector<double> kronecker_alphas(int d) {
  // g solves g^(d+1) = g + 1; alpha_a = g^-(a+1) gives a well-distributed
  // additive recurrence in d dimensions.
  double g = 1.5;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (d + 1));
  std::vector<double> alphas(d);
  double p = 1.0;
  for (int a = 0; a < d; ++a) {
    p /= g;
    alphas[a] = p;
  }
  return alphas;
}

double lattice_coord(std::uint64_t seed, std::uint64_t stream, int axis, int dim,
                     std::int64_t k) {
  const auto alphas = kronecker_alphas(dim);
  const std::uint64_t mixed =
      splitmix64(seed ^ splitmix64(stream * 0x100000001b3ULL + static_cast<std::uint64_t>(axis)));
  const double offset = u01_from_bits(mixed);
  return frac01(offset + static_cast<double>(k) * alphas[axis]);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

int thread_budget() {
  if (const char* env = std::getenv("MCE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void parallel_for(int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int threads = std::min(count, thread_budget());
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string format_g17(double v) { return format_g(v, 17); }

std::string format_g(double v, int sig) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, v);
  return buf;
}

std::vector<double> make_grid(bool log_spaced, double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("grid count must be >= 2");
  if (!(lo < hi)) throw std::invalid_argument("grid requires lo < hi");
  if (log_spaced && lo <= 0.0) throw std::invalid_argument("log grid requires lo > 0");
  std::vector<double> grid(count);
  if (log_spaced) {
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
      grid[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    grid.front() = lo;
  } else {
    for (int i = 0; i < count; ++i) grid[i] = lo + (hi - lo) * i / (count - 1);
    grid.front() = lo;
  }
  grid.back() = hi;
  return grid;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mce
