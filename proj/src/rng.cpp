#include "symchi/rng.hpp"

#include "symchi/special.hpp"

namespace symchi {

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer(seed ^ (stream * 0xD1B54A32D192ED03ull + 0x9E3779B97F4A7C15ull));
  mixer.next();
  return mixer.next();
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(substream_key(seed, stream)) {}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_quantile(uniform_open()); }

}  // namespace symchi
