#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace asdep {

// Deterministic random stream identified by (seed, stream id). Distinct
// stream ids give statistically independent sequences, so parallel
// workers can each own one without coordination.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1).
  double uniform();
  double uniform(double a, double b);
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// SplitMix64 finalizer; used to derive engine seeds and sub-stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace asdep
