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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "selent/rng.hpp"

namespace {

using selent::PhiloxStream;
using selent::Shape;

// Known answers from the Random123 test vectors and numpy.random.Philox.
TEST(Philox, KnownAnswers) {
    const auto zero = selent::philox4x64({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(zero[0], 0x16554d9eca36314cULL);
    EXPECT_EQ(zero[1], 0xdb20fe9d672d0fdcULL);
    EXPECT_EQ(zero[2], 0xd7e772cee186176bULL);
    EXPECT_EQ(zero[3], 0x7e68b68aec7ba23bULL);
    const auto other = selent::philox4x64({1, 2, 3, 4}, {5, 6});
    EXPECT_EQ(other[0], 0xa39b5519339fe354ULL);
    EXPECT_EQ(other[1], 0xaceb1228efc25196ULL);
    EXPECT_EQ(other[2], 0xa0a2e3c25aa5f4fcULL);
    EXPECT_EQ(other[3], 0x08d0cfa9332720dfULL);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    PhiloxStream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12), d(7, 4, 11);
    int same_c = 0, same_d = 0;
    for (int i = 0; i < 64; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        same_c += x == c() ? 1 : 0;
        same_d += x == d() ? 1 : 0;
    }
    EXPECT_EQ(same_c, 0);
    EXPECT_EQ(same_d, 0);
}

TEST(Uniform, OpenInterval) {
    PhiloxStream rng(1, 0, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = selent::uniform_open01(rng);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

struct Moments {
    double mean;
    double var;
};

Moments gamma_moments(double alpha, double theta, int n, std::uint64_t seed) {
    PhiloxStream rng(seed, 0, 0);
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double x = selent::sample_gamma(Shape(alpha), theta, rng);
        const double d = x - mean;
        mean += d / i;
        m2 += d * (x - mean);
    }
    return {mean, m2 / (n - 1)};
}

TEST(GammaSampler, MeanAndVariance) {
    const int n = 1000000;
    const auto m = gamma_moments(2.0, 3.0, n, 42);
    EXPECT_NEAR(m.mean, 6.0, 4.0 * std::sqrt(18.0 / n));
    // Var of the sample variance for Gamma: (μ4 − σ⁴)/n with μ4 = 3α(α+2)θ⁴.
    const double mu4 = 3.0 * 2.0 * 4.0 * 81.0;
    EXPECT_NEAR(m.var, 18.0, 4.0 * std::sqrt((mu4 - 18.0 * 18.0) / n));
}

TEST(GammaSampler, SmallShapeBoost) {
    const int n = 400000;
    for (double alpha : {0.2, 0.5}) {
        const auto m = gamma_moments(alpha, 1.5, n, 9);
        const double var = alpha * 2.25;
        EXPECT_NEAR(m.mean, alpha * 1.5, 4.0 * std::sqrt(var / n)) << alpha;
        const double mu4 = 3.0 * alpha * (alpha + 2.0) * std::pow(1.5, 4);
        EXPECT_NEAR(m.var, var, 4.0 * std::sqrt((mu4 - var * var) / n)) << alpha;
    }
}

TEST(GammaSampler, FixedSeedBitIdentical) {
    PhiloxStream a(99, 1, 2), b(99, 1, 2);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(selent::sample_gamma(Shape(0.7), 2.0, a), selent::sample_gamma(Shape(0.7), 2.0, b));
    }
}

TEST(GammaSampler, RejectsBadScale) {
    PhiloxStream rng(0, 0, 0);
    EXPECT_THROW(selent::sample_gamma(Shape(1.0), 0.0, rng), selent::DomainError);
}

}  // namespace
