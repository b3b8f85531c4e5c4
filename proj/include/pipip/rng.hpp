#pragma once

#include <cstdint>
#include <random>

namespace pipip {

// One stream per agent per episode. mt19937_64 output is fully specified by
// the standard, so identical seeds give identical traces on every platform.
class rng_stream {
public:
    rng_stream(std::uint64_t seed, std::uint32_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                          static_cast<std::uint32_t>(seed >> 32), stream};
        eng_.seed(seq);
    }

    // uniform in [0,1) with 53-bit resolution
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform index in [0,n); modulo bias is below 2^-53 * n, negligible for
    // the tiny sets used here, and the simple form keeps draws reproducible
    int index(int n) {
        return static_cast<int>(eng_() % static_cast<std::uint64_t>(n));
    }

private:
    std::mt19937_64 eng_;
};

} // namespace pipip
