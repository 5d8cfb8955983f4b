#include "disac/rng.hpp"

#include <cmath>

namespace disac {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t derive_key(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t state = base ^ (salt * 0x9E3779B97F4A7C15ull);
    std::uint64_t k = splitmix64(state);
    k ^= splitmix64(state);
    return k;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t key) : key_(key) {
    std::uint64_t state = key;
    // Expand the key through splitmix so near-identical keys still give
    // well-separated engine states.
    std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state),
                      splitmix64(state)};
    engine_.seed(seq);
}

RandomStream::RandomStream(std::uint64_t seed, const std::string& label)
    : RandomStream(derive_key(seed, fnv1a(label))) {}

RandomStream RandomStream::sub(const std::string& label) const {
    return RandomStream(derive_key(key_, fnv1a(label)));
}

RandomStream RandomStream::sub(std::uint64_t index) const {
    return RandomStream(derive_key(key_, index + 0x51ED2701));
}

double RandomStream::uniform() {
    // 53-bit mantissa resolution in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RandomStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
}

cplx RandomStream::cgaussian() {
    return cplx(gaussian(), gaussian()) / std::sqrt(2.0);
}

double RandomStream::exponential(double mean) {
    double u = 0.0;
    do {
        u = uniform();
    } while (u <= 0.0);
    return -mean * std::log(u);
}

double RandomStream::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale < 0.0) throw DisacError("gamma: invalid parameters");
    if (shape < 1.0) {
        // Boost trick: Gamma(a) = Gamma(a+1) * U^(1/a).
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

}  // namespace disac
