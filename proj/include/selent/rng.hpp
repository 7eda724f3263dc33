/*
   Copyright 2026 The selent Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "selent/numerics.hpp"

namespace selent {

namespace detail {
__extension__ using uint128 = unsigned __int128;
}  // namespace detail

/// Philox4x64-10 block function (Salmon et al., Random123).
inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr, std::array<std::uint64_t, 2> key) {
    constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t m1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const detail::uint128 p0 = static_cast<detail::uint128>(m0) * ctr[0];
        const detail::uint128 p1 = static_cast<detail::uint128>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
        const auto lo0 = static_cast<std::uint64_t>(p0);
        const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
        const auto lo1 = static_cast<std::uint64_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Counter-based stream addressed by (seed, stream, substream). Two streams
/// with different addresses never share a counter, so any (grid point,
/// replication) can be drawn independently of evaluation order.
/// Satisfies UniformRandomBitGenerator.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
        : key_{seed, stream}, substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            buffer_ = philox4x64({block_++, substream_, 0, 0}, key_);
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
};

/// Uniform on the open interval (0, 1) with 53 random bits.
template <class Rng>
double uniform_open01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal by the Marsaglia polar method.
template <class Rng>
double standard_normal(Rng& rng) {
    for (;;) {
        const double u = 2.0 * uniform_open01(rng) - 1.0;
        const double v = 2.0 * uniform_open01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

/// Gamma(shape α, scale θ) draw. Marsaglia–Tsang squeeze/rejection; for
/// α < 1 a Gamma(α + 1) draw is multiplied by U^{1/α}.
template <class Rng>
double sample_gamma(Shape alpha, double theta, Rng& rng) {
    detail::require_positive(theta, "sample_gamma");
    double a = alpha.value();
    double boost = 1.0;
    if (a < 1.0) {
        boost = std::exp(std::log(uniform_open01(rng)) / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open01(rng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return theta * d * v * boost;
        }
    }
}

}  // namespace selent
