#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace top {

/// splitmix64 finalizer; decorrelates seed/stream/index triples so every
/// document, draw, and replicate gets an independent stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1) + 0xbf58476d1ce4e5b9ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, n); n > 0.
    std::size_t uniform_int(std::size_t n) {
        std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= bound);
        return static_cast<std::size_t>(x % n);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform_real() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() { return std::normal_distribution<double>{}(gen_); }

    double gamma(double shape) { return std::gamma_distribution<double>{shape, 1.0}(gen_); }

    std::int64_t binomial(std::int64_t trials, double prob) {
        if (trials <= 0 || prob <= 0.0) return 0;
        if (prob >= 1.0) return trials;
        return std::binomial_distribution<std::int64_t>{trials, prob}(gen_);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_int(i)]);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace top
