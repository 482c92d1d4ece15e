#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ruin {

// SplitMix64 step; used only to mix (seed, stream, substream) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a 64-bit engine seed that is a pure function of (seed, stream, substream).
/// Path i of any worker uses stream = i, so results do not depend on the worker count.
inline std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t substream) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    s = k ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    k = splitmix64(s);
    s = k ^ (substream * 0x9e6c63d0676a9a99ULL + 0x853c49e6748fea9bULL);
    return splitmix64(s);
}

// Substream tags: the R-driver and P-driver of one path never share draws.
inline constexpr std::uint64_t kSubstreamR = 0;
inline constexpr std::uint64_t kSubstreamP = 1;
inline constexpr std::uint64_t kSubstreamBridge = 2;

/// Random stream with explicitly coded samplers so that draw sequences are a
/// pure function of the derived key (no reliance on library distribution state).
class StreamRng {
  public:
    explicit StreamRng(std::uint64_t key) : engine_(key) {}

    StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
        : engine_(derive_stream_key(seed, stream, substream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on (0,1]; never returns 0 so log() is safe.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Poisson count by Knuth multiplication; mean is lambda*dt, small in practice.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t n = 0;
        double prod = uniform();
        while (prod > limit) {
            ++n;
            prod *= uniform();
        }
        return n;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ruin
