#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lpfda {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based stream derivation: replication r of a run with a given
// master seed always gets the same seed, independent of scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream) {
    return detail::mix64(master_seed ^ (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

// Seeded generator with hand-rolled output transforms so that streams are
// bit-identical across standard library implementations (std::mt19937_64 is
// specified by the standard, the distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
        return Rng(derive_stream_seed(master_seed, stream));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lpfda
