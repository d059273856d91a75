#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace regressgan {

// 64-bit FNV-1a with a splitmix64 finalizer. Used to derive independent
// per-cell seeds from a base seed plus string/int tags, so that parallel
// harness cells never share RNG state and execution order cannot matter.
std::uint64_t stable_mix(std::uint64_t h, std::string_view tag);
std::uint64_t stable_mix(std::uint64_t h, std::uint64_t value);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> tags);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> tags,
                          std::uint64_t index);

// Seeded random stream. The engine is std::mt19937_64 (its sequence is fully
// pinned by the standard); every distribution transform is implemented here
// rather than via std:: distributions, whose sequences are
// implementation-defined, so results are reproducible across toolchains.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1).
    double uniform_pos();

    // Standard normal via Box-Muller. The paired draw is cached.
    double normal();

    // Gamma(shape, scale) via Marsaglia-Tsang, with the power boost for shape < 1.
    double gamma(double shape, double scale);

    // Poisson(lambda): sequential inversion below lambda = 10, Hormann's PTRS
    // transformed rejection above.
    long poisson(double lambda);

    bool bernoulli(double p) { return uniform() < p; }

    // Fisher-Yates shuffle of indices, used by the split/subsample code.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace regressgan
