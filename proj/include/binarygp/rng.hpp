#ifndef BINARYGP_RNG_HPP
#define BINARYGP_RNG_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace binarygp {

using Rng = std::mt19937_64;

/// Sub-seed for stream `index` of a run seeded with `master`:
/// seed_j = splitmix64(master ^ splitmix64(j + 1)).
/// Every parallel unit of work draws from its own derived stream, so results
/// do not depend on how work is scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master ^ mix(index + 1));
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int bernoulli(Rng& rng, double p) { return uniform01(rng) < p ? 1 : 0; }

/// Runs fn(i) for i in [0, count) on up to `threads` workers. fn must only
/// write to slots owned by index i.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // The exception of the lowest failing index is rethrown after all workers
  // join, which matches what a serial loop would report.
  std::mutex guard;
  std::exception_ptr error;
  std::size_t error_index = count;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += threads) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(guard);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace binarygp

#endif  // BINARYGP_RNG_HPP
