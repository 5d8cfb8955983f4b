#ifndef DISAC_RNG_HPP
#define DISAC_RNG_HPP

#include <cstdint>
#include <random>
#include <string>

#include "disac/common.hpp"

namespace disac {

/// Deterministic random stream keyed by (seed, label). Streams with different
/// labels or seeds are statistically independent; identical keys reproduce the
/// identical sequence on every platform (all samplers are implemented here
/// rather than delegated to std:: distributions, whose output is
/// implementation-defined).
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, const std::string& label);

    /// Child stream keyed by (this stream's key, sub-label). Used to hand
    /// independent streams to parallel workers without sharing state.
    RandomStream sub(const std::string& label) const;
    RandomStream sub(std::uint64_t index) const;

    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller.
    double gaussian();
    /// Circularly-symmetric complex Gaussian, unit variance (CN(0,1)).
    cplx cgaussian();
    /// Exponential with the given mean.
    double exponential(double mean);
    /// Gamma(shape, scale), Marsaglia-Tsang.
    double gamma(double shape, double scale);

    std::uint64_t key() const { return key_; }

  private:
    explicit RandomStream(std::uint64_t key);

    std::uint64_t key_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace disac

#endif
