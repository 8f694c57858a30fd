#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace decarb {

// Derives an independent child seed from a base seed and a stream name, so
// that population generation, survey sampling and threshold noise never
// share a random stream.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream);

// Seeded generator with the sampling helpers the simulator needs. The raw
// engine is std::mt19937_64 (bit-exact by the standard); the distribution
// transforms are implemented here so the draw layout is under our control.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double normal();

    // Unbiased integer on [0, n); n must be >= 1.
    std::size_t uniform_index(std::size_t n);

    // First k entries of a seeded partial Fisher-Yates shuffle of [0, n).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace decarb
