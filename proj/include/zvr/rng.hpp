#ifndef ZVR_RNG_HPP
#define ZVR_RNG_HPP

#include <cstdint>
#include <random>

#include "zvr/tensor.hpp"

namespace zvr {

// Deterministic RNG. std::normal_distribution is implementation-defined, so
// gaussians come from an explicit Box-Muller on top of mt19937_64; outputs are
// reproducible across standard libraries. Streams derived from the same seed
// with different ids are independent, so adding a consumer does not shift the
// draws of another.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : engine_(mix(seed, stream)) {}

    double uniform() {  // [0, 1)
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    VideoTensor normal_tensor(Dims4 dims) {
        VideoTensor out(dims);
        for (size_t i = 0; i < out.size(); ++i) out[i] = float(normal());
        return out;
    }

    uint64_t next_u64() { return engine_(); }

private:
    static uint64_t mix(uint64_t seed, uint64_t stream) {
        // splitmix64 over (seed, stream)
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace zvr

#endif
