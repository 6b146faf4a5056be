// rng.hpp - reproducible random streams (splitmix64-seeded xoshiro256++).
//
// A stream is identified by (seed, stream_id): identical identifiers give
// bit-identical draws on every platform, distinct stream_ids give
// statistically independent streams.  Factor tau of Monte Carlo trial t
// always draws from the stream derived by hashing (t, tau), so results never
// depend on thread scheduling.
//
// uniform01 maps a 64-bit word to (0,1) as ((x >> 11) + 1/2) * 2^-53, never
// returning an endpoint.  The standard complex Gaussian uses the polar form
// sqrt(-log u1) * e^{2 pi i u2}: |g|^2 is Exp(1), so E|g|^2 = 1 and the real
// and imaginary parts carry variance 1/2 each.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace picketlab {

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t state = x;
    return splitmix64(state);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Stream for component `index` of a parent stream (a trial, or a factor
// within a trial).
inline RngStream substream(RngStream parent, std::uint64_t index) {
    return RngStream{parent.seed,
                     detail::mix64(parent.stream_id ^
                                   detail::mix64(index + 0x6a09e667f3bcc909ULL))};
}

// The stream factor tau of trial `trial` draws from, for a given base seed.
inline RngStream trial_factor_stream(std::uint64_t seed, std::uint64_t trial,
                                     std::uint64_t tau) {
    return substream(substream(RngStream{seed, 0}, trial), tau);
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(RngStream id) {
        std::uint64_t sm =
            detail::mix64(id.seed) ^ detail::mix64(id.stream_id + 0x9e3779b97f4a7c15ULL);
        for (auto& word : state_)
            word = detail::splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

private:
    std::uint64_t state_[4];
};

inline double uniform01(Xoshiro256pp& rng) {
    return (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1p-53;
}

inline std::complex<double> standard_complex_gaussian(Xoshiro256pp& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace picketlab
