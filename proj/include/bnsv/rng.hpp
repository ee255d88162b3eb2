#ifndef BNSV_RNG_HPP
#define BNSV_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace bnsv {

// Deterministic, platform-stable random streams built on xoshiro256++ with
// splitmix64 stream derivation. A stream is addressed by (seed, path...), so
// independent substreams (one per sample row, per permutation, per nested
// chain) can be derived without coordination; results are then independent of
// worker count.
//
// Draw contract (fixed; replayed chains and samples depend on it):
//   uniform01  -> one 64-bit word, value in (0, 1]
//   normal     -> Box-Muller, consumes exactly two uniforms, no caching
//   gamma      -> Marsaglia-Tsang rejection (exact); shape < 1 via the
//                 Gamma(shape+1) * U^(1/shape) boost, computed in log space
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64();
    double uniform01();                       // (0, 1]
    double normal();                          // N(0, 1)
    double normal(double mean, double var);   // var >= 0
    double gamma(double shape);               // Gamma(shape, 1), shape > 0
    double log_gamma_draw(double shape);      // log of a Gamma(shape, 1) draw
    double inv_gamma(double shape, double rate);  // 1 / Gamma(shape, rate)

private:
    std::uint64_t s_[4];
};

std::uint64_t splitmix64_next(std::uint64_t& state);

}  // namespace bnsv

#endif
