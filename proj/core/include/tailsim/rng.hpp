#pragma once

// Deterministic parallel random number streams. Every Monte Carlo
// replication draws from its own engine derived from (seed, replication
// index), so results are identical for any worker count.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace tailsim::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// independent named stream family: derive(seed, "tcf-lhs"), ...
inline std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  return splitmix64(seed ^ fnv1a(tag));
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

// uniform in (0, 1]
inline double uniform_pos(std::mt19937_64& gen) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(gen);
}

inline int effective_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw > 8 ? 8 : hw);
}

// Evaluate f(rep_index, engine) for rep_index in [0, n), in parallel,
// storing the result at its replication slot. The outcome is a pure
// function of (seed, n), never of scheduling.
template <class T, class F>
std::vector<T> replicate(std::size_t n, std::uint64_t seed, int workers, F&& f) {
  std::vector<std::optional<T>> slots(n);
  int nw = effective_workers(workers);
  if (nw <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) {
      auto gen = substream(seed, i);
      slots[i].emplace(f(i, gen));
    }
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (static_cast<std::size_t>(nw) * 16));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        try {
          for (;;) {
            std::size_t lo = next.fetch_add(chunk);
            if (lo >= n || failed.load()) return;
            std::size_t hi = std::min(n, lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
              auto gen = substream(seed, i);
              slots[i].emplace(f(i, gen));
            }
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class F>
std::vector<double> replicate_doubles(std::size_t n, std::uint64_t seed, int workers, F&& f) {
  return replicate<double>(n, seed, workers, std::forward<F>(f));
}

}  // namespace tailsim::rng
