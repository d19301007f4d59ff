#pragma once

#include <cstdint>
#include <limits>

namespace robustq::sim {

// Counter-based generator: output k of a stream is splitmix64(key + k * golden_gamma),
// where the key hashes (seed, stream, substream). Streams never share state, so
// replication r of a batch draws the same numbers regardless of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double exponential(double rate) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Well-known component ids for the streams of one replication.
enum class Stream : std::uint64_t {
  arrivals = 1,
  patience = 2,
  service = 3,
  thinning = 4,
  renewal = 5,
  classes = 6,
};

inline CounterRng make_stream(std::uint64_t seed, std::uint64_t replication, Stream s,
                              std::uint64_t index = 0) noexcept {
  return CounterRng(seed, replication, (static_cast<std::uint64_t>(s) << 32) ^ index);
}

}  // namespace robustq::sim
