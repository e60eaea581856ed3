#pragma once

#include <cstdint>

namespace tdo {

// Deterministic splitmix64 generator. We roll our own instead of using
// <random> distributions so that seeded runs are byte-identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    long uniform_int(long lo, long hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(next() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Derive an independent stream; mixing the tag through the generator
    // decorrelates substreams of the same master seed.
    Rng fork(std::uint64_t tag) const {
        Rng mixer(state_ ^ (tag * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
        Rng out(mixer.next());
        return out;
    }

private:
    std::uint64_t state_;
};

} // namespace tdo
