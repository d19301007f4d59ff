#include "robustq/sim/rng.hpp"

#include <cmath>

namespace robustq::sim {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) noexcept
    : key_(splitmix64(splitmix64(seed + kGamma) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + kGamma) ^
                      splitmix64(substream * 0x8CB92BA72F3D8DD7ULL + 2 * kGamma))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return splitmix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() noexcept {
  // 53 random bits, shifted by half an ulp so that 0 is excluded.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

}  // namespace robustq::sim
