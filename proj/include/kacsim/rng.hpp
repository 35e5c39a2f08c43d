#pragma once

#include <cstdint>
#include <random>

namespace kac {

// 64-bit finalizer from SplitMix64.
std::uint64_t splitmix64(std::uint64_t x);

// Hash of (seed, stream index) used to key independent streams. Pure function
// of its arguments, so stream contents do not depend on scheduling.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index);

// Random stream owned by a single unit of work. Not shareable between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key);
  static RngStream for_stream(std::uint64_t seed, std::uint64_t index) {
    return RngStream(stream_key(seed, index));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }
  double exponential(double rate);
  double normal();
  // Uniform on {0, ..., n-1}.
  std::uint64_t index(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace kac
