#include "bnsv/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bnsv/error.hpp"

namespace bnsv {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64_next(sm);
}

RngStream RngStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = seed;
    for (std::uint64_t p : path) {
        std::uint64_t mix = h ^ (p + 0x9e3779b97f4a7c15ULL);
        h = splitmix64_next(mix) ^ p;
    }
    return RngStream(h);
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform01() {
    // 53 significant bits, shifted into (0, 1] so log() is always finite
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::normal(double mean, double var) {
    return mean + std::sqrt(var) * normal();
}

double RngStream::gamma(double shape) {
    return std::exp(log_gamma_draw(shape));
}

double RngStream::log_gamma_draw(double shape) {
    if (!(shape > 0.0))
        throw Error(errc::invalid_chain_params, "gamma shape must be > 0");
    double boost = 0.0;
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^(1/a); log space keeps tiny shapes finite
        boost = std::log(uniform01()) / shape;
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v) + boost;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v) + boost;
    }
}

double RngStream::inv_gamma(double shape, double rate) {
    // 1/G with G ~ Gamma(shape, rate); log space so vague-prior draws
    // (shape ~ 0.01) cannot round to 0 and produce an infinite variance.
    const double lg = log_gamma_draw(shape) - std::log(rate);
    double v = std::exp(-lg);
    if (v > 1e300) v = 1e300;
    if (v < 1e-300) v = 1e-300;
    return v;
}

}  // namespace bnsv
