#include "regressgan/rng.hpp"

#include <cmath>

#include "regressgan/errors.hpp"

namespace regressgan {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stable_mix(std::uint64_t h, std::string_view tag) {
    for (unsigned char c : tag) {
        h ^= c;
        h *= kFnvPrime;
    }
    h ^= 0xff;  // separator so ("ab","c") != ("a","bc")
    h *= kFnvPrime;
    return h;
}

std::uint64_t stable_mix(std::uint64_t h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> tags) {
    std::uint64_t h = stable_mix(kFnvOffset, base);
    for (auto t : tags) h = stable_mix(h, t);
    return splitmix64(h);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> tags,
                          std::uint64_t index) {
    std::uint64_t h = stable_mix(kFnvOffset, base);
    for (auto t : tags) h = stable_mix(h, t);
    h = stable_mix(h, index);
    return splitmix64(h);
}

double RngStream::uniform_pos() {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return u;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
}

double RngStream::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw DomainError("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^(1/a)
        const double u = uniform_pos();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

long RngStream::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("poisson: lambda must be finite and nonnegative");
    }
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
        // Sequential inversion of the CDF.
        const double u = uniform();
        double p = std::exp(-lambda);
        double cdf = p;
        long k = 0;
        while (u > cdf && k < 2000) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Hormann's PTRS (transformed rejection with squeeze).
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -lambda + kf * loglam - std::lgamma(kf + 1.0)) {
            return static_cast<long>(kf);
        }
    }
}

}  // namespace regressgan
