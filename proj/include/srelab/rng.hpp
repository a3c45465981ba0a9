#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace srelab {

// SplitMix64 step, used to derive independent substream seeds from a base
// seed without correlations between nearby indices.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = base ^ (0x517cc1b727220a95ULL * (index + 1));
    std::uint64_t b = splitmix64(s);
    return a ^ b;
}

// Seedable Gaussian sampler with a fixed algorithm. mt19937_64 is specified
// bit-for-bit by the standard; std::normal_distribution is not, so Box-Muller
// on 53-bit uniforms is spelled out here to keep streams portable.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0,1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace srelab
