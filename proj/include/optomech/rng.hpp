#pragma once

#include <cmath>
#include <cstdint>

namespace optomech {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so bins can be filled in any order or in
/// parallel and still reproduce bit for bit. The mixing function is the
/// SplitMix64 finalizer applied to a Weyl-sequence combination of the
/// three words.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
    std::uint64_t z = mix(seed_ + 0x9e3779b97f4a7c15ULL);
    z = mix(z ^ (stream * 0xd1b54a32d192ed03ULL));
    return mix(z + counter * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on (0, 1]; never returns 0 so log() is always finite.
  constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return static_cast<double>((bits(stream, counter) >> 11) + 1) * 0x1.0p-53;
  }

  // chi^2 with 2k degrees of freedom divided by 2k: the spread of a
  // periodogram bin averaged over k independent segments. Mean 1.
  double averaged_periodogram_factor(std::uint64_t stream, unsigned k) const {
    double sum = 0.0;
    for (unsigned j = 0; j < k; ++j) sum -= std::log(uniform(stream, j));
    return sum / static_cast<double>(k);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace optomech
