#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace akd {

// Named sub-streams derived from one master seed. Keeping the derivation
// counter-based lets an experiment change one stochastic component (e.g. the
// selection strategy's draws) without disturbing the others.
enum class Stream : std::uint64_t {
    DataGen = 1,
    Split = 2,
    Subsample = 3,
    StudentInit = 4,
    TrainShuffle = 5,
    Strategy = 6,
    TeacherBall = 7,
    Metrics = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// seed for (master, stream, index); two mixing rounds keep nearby masters and
// indices statistically unrelated.
inline std::uint64_t substream_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) {
    std::uint64_t z = splitmix64(master ^ (0x632be59bd9b4e019ull * static_cast<std::uint64_t>(stream)));
    return splitmix64(z ^ (0xd6e8feb86659fd93ull * (index + 1)));
}

// mt19937_64 with hand-rolled distributions. The std distributions are
// implementation-defined, so uniform/normal are derived from raw bits here to
// keep every draw identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 random mantissa bits
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform over {0, ..., n-1}
    std::uint64_t uniform_index(std::uint64_t n) {
        // multiply-shift; bias is ~2^-64 and irrelevant at these scales
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    // standard normal via Box-Muller; one value per call, no caching so the
    // draw count stays predictable for replay tests
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // first k of a Fisher-Yates pass; returns k distinct elements of v
    template <typename T>
    std::vector<T> sample_without_replacement(std::vector<T> v, std::size_t k) {
        if (k > v.size()) k = v.size();
        std::vector<T> out;
        out.reserve(k);
        std::size_t n = v.size();
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
            std::swap(v[i], v[j]);
            out.push_back(v[i]);
        }
        return out;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace akd
