#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "asdep/random.hpp"

namespace asdep {

// Monte Carlo loops are cut into fixed-size blocks. Each block draws from
// its own stream and produces a partial result; partials are reduced in
// block order. Results therefore depend on the seed only, never on the
// thread count.
inline constexpr std::size_t kBlockSize = 256;

inline std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

// Stream for one (purpose, block) pair. Purposes keep the X, V and V'
// draws of one block independent of each other.
inline RngStream block_stream(std::uint64_t seed, std::uint64_t purpose, std::size_t block) {
  return RngStream(seed, (purpose << 40) ^ static_cast<std::uint64_t>(block));
}

// Runs fn(block, begin, end) for every block of [0, n) on up to `threads`
// workers and returns the partials indexed by block. The first exception
// thrown by any worker is rethrown here.
template <class Fn>
auto run_blocks(std::size_t n, std::size_t threads, Fn&& fn) {
  using Partial = std::invoke_result_t<Fn&, std::size_t, std::size_t, std::size_t>;
  const std::size_t blocks = block_count(n);
  std::vector<std::optional<Partial>> slots(blocks);

  auto work = [&](std::size_t worker, std::size_t stride, std::exception_ptr& err) {
    try {
      for (std::size_t b = worker; b < blocks; b += stride) {
        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(n, begin + kBlockSize);
        slots[b].emplace(fn(b, begin, end));
      }
    } catch (...) {
      err = std::current_exception();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, blocks));
  std::vector<std::exception_ptr> errors(workers);
  if (workers == 1) {
    work(0, 1, errors[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] { work(w, workers, errors[w]); });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Partial> out;
  out.reserve(blocks);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace asdep
