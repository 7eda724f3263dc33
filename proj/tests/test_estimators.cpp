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
#include <numbers>
#include <random>
#include <vector>

#include "selent/estimators.hpp"

namespace {

using selent::EstimatorId;
using selent::Shape;
using selent::SufficientStat;

std::vector<EstimatorId> all_variants(Shape alpha) {
    const double a = alpha.value();
    return {selent::NaiveWorse{std::log(a)},
            selent::GenBayesWorse{0.3},
            selent::ShrinkWorse{std::log(a)},
            selent::ShrinkWorse{std::log1p(a)},
            selent::NaiveBetter{selent::digamma(a)},
            selent::GenBayesBetter{-0.5 * a},
            selent::ShrinkBetter{std::log(a)},
            selent::ShrinkBetter{selent::digamma(2 * a) - std::log(2.2)},
            selent::CustomWorse{[alpha](double t) { return selent::phi_star_worse(t, alpha); }, "phi_star"},
            selent::CustomBetter{[](double v) { return 0.1 * std::log(v); }, "log"}};
}

TEST(Selection, PicksLargerAsWorseAndSmallerAsBetter) {
    const auto s = selent::select(SufficientStat(3.0, 5.0, Shape(2.0)));
    EXPECT_EQ(s.s_index, 2);
    EXPECT_EQ(s.m_index, 1);
    EXPECT_DOUBLE_EQ(s.z1, 3.0);
    EXPECT_DOUBLE_EQ(s.z2, 5.0);
    EXPECT_DOUBLE_EQ(s.t, 0.6);
    EXPECT_DOUBLE_EQ(s.v, 5.0 / 3.0);
}

TEST(Selection, TiesPickPopulationOne) {
    const auto s = selent::select(SufficientStat(4.0, 4.0, Shape(1.0)));
    EXPECT_EQ(s.s_index, 1);
    EXPECT_EQ(s.m_index, 1);
    EXPECT_DOUBLE_EQ(s.t, 1.0);
}

TEST(Selection, InvalidInputs) {
    EXPECT_THROW(SufficientStat(0.0, 1.0, Shape(1.0)), selent::DomainError);
    EXPECT_THROW(SufficientStat(1.0, -1.0, Shape(1.0)), selent::DomainError);
    EXPECT_THROW(selent::ScaleParams(1.0, 0.0), selent::DomainError);
}

TEST(Entropy, GammaEntropy) {
    EXPECT_NEAR(selent::entropy_gamma(3.0, Shape(1.0)), 1.0 + std::log(3.0), 4e-15);
    EXPECT_NEAR(selent::entropy_constant(Shape(2.0)), 2.0 + 0.0 - (1.0 - std::numbers::egamma), 1e-14);
    const selent::ScaleParams p(2.0, 7.0);
    const SufficientStat stat(1.0, 4.0, Shape(1.0));
    EXPECT_DOUBLE_EQ(selent::true_selected_entropy(p, stat, selent::Target::worse), std::log(7.0));
    EXPECT_DOUBLE_EQ(selent::true_selected_entropy(p, stat, selent::Target::better), std::log(2.0));
}

TEST(Estimators, ClosedForms) {
    const Shape alpha(3.0);
    const SufficientStat stat(2.0, 10.0, alpha);
    EXPECT_DOUBLE_EQ(selent::estimate(stat, selent::NaiveWorse{0.5}), std::log(10.0) - 0.5);
    EXPECT_DOUBLE_EQ(selent::estimate(stat, selent::NaiveBetter{0.5}), std::log(2.0) - 0.5);
    EXPECT_NEAR(selent::estimate(stat, selent::GenBayesWorse{0.0}), std::log(10.0) - selent::digamma(3.0), 1e-15);
    EXPECT_NEAR(selent::estimate(stat, selent::GenBayesBetter{1.0}), std::log(2.0) - selent::digamma(4.0), 1e-15);
    // t = 0.2 is below the threshold for c = ln 3, so no shrinkage.
    EXPECT_DOUBLE_EQ(selent::estimate(stat, selent::ShrinkWorse{std::log(3.0)}), std::log(10.0) - std::log(3.0));
    const SufficientStat close(9.0, 10.0, alpha);
    EXPECT_NEAR(selent::estimate(close, selent::ShrinkWorse{std::log(3.0)}), std::log(19.0) - selent::digamma(6.0),
                1e-15);
}

TEST(Estimators, GenBayesRejectsImproperExponent) {
    const SufficientStat stat(1.0, 2.0, Shape(1.0));
    EXPECT_THROW(selent::estimate(stat, selent::GenBayesWorse{-1.0}), selent::DomainError);
    EXPECT_THROW(selent::estimate(stat, selent::GenBayesBetter{-2.0}), selent::DomainError);
}

TEST(Estimators, TargetsAndLabels) {
    EXPECT_EQ(selent::target_of(selent::ShrinkWorse{1.0}), selent::Target::worse);
    EXPECT_EQ(selent::target_of(selent::GenBayesBetter{0.0}), selent::Target::better);
    EXPECT_EQ(selent::label(selent::NaiveWorse{0.5}), "naive_worse(c=0.5)");
    EXPECT_EQ(selent::label(selent::GenBayesBetter{0}), "genbayes_better(beta=0)");
    EXPECT_EQ(selent::label(selent::CustomWorse{[](double) { return 0.0; }, "zero"}), "custom_worse(zero)");
}

class EquivarianceTest : public ::testing::TestWithParam<double> {};

TEST_P(EquivarianceTest, ScaleAndPermutation) {
    const Shape alpha(GetParam());
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> log_u(-8.0, 8.0);
    for (int i = 0; i < 1000; ++i) {
        const SufficientStat stat(std::exp(log_u(gen)), std::exp(log_u(gen)), alpha);
        const double a = std::exp(log_u(gen));
        for (const auto& id : all_variants(alpha)) {
            const double base = selent::estimate(stat, id);
            EXPECT_EQ(selent::estimate(stat.swapped(), id), base) << selent::label(id);
            EXPECT_NEAR(selent::estimate(stat.scaled(a), id), base + std::log(a), 1e-12) << selent::label(id);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Shapes, EquivarianceTest, ::testing::Values(0.2, 1.0, 2.5, 24.0));

TEST(Shrinkage, WorseContinuousAtThreshold) {
    for (double alpha : {0.2, 0.5, 1.0, 2.0, 24.0}) {
        const Shape a(alpha);
        for (double c : {std::log(alpha), std::log1p(alpha), selent::digamma(alpha)}) {
            const double d = selent::shrink_worse_threshold(c, a);
            if (!(d > 0.0 && d < 1.0)) continue;
            const double below = selent::estimate(SufficientStat(std::nextafter(d, 0.0), 1.0, a),
                                                  selent::ShrinkWorse{c});
            const double at = selent::estimate(SufficientStat(d, 1.0, a), selent::ShrinkWorse{c});
            EXPECT_NEAR(below, at, 1e-10) << alpha << " " << c;
            EXPECT_NEAR(at, std::log1p(d) - selent::digamma(2 * alpha), 1e-15);
        }
    }
}

TEST(Shrinkage, BetterContinuousAtLowerThreshold) {
    for (double alpha : {0.25, 1.0, 4.0}) {
        const Shape a(alpha);
        const double lambda = selent::lambda_threshold(a);
        const double psi2 = selent::digamma(2 * alpha);
        // Choose c so that the switch point sits inside (1, lambda).
        const double d = 0.5 * (1.0 + lambda);
        const double c = psi2 - std::log1p(d);
        const double at = selent::shrink_better_estimate(SufficientStat(1.0, d, a), c, lambda);
        const double above = selent::shrink_better_estimate(SufficientStat(1.0, std::nextafter(d, 3.0), a), c, lambda);
        EXPECT_NEAR(at, above, 1e-10) << alpha;
    }
}

TEST(Shrinkage, BetterGuardedByLambda) {
    const Shape a(24.0);
    const SufficientStat boeing(1869.0, 1539.0, a);
    const double c = std::log(24.0);
    EXPECT_DOUBLE_EQ(selent::estimate(boeing, selent::ShrinkBetter{c}), std::log(1539.0) - c);
    EXPECT_NEAR(selent::shrink_better_estimate(boeing, c, 1.5), std::log(3408.0) - selent::digamma(48.0), 1e-14);
}

TEST(Improvement, CapsAtPhiStar) {
    const Shape a(2.0);
    const double t = 0.7;
    const double cap = selent::phi_star_worse(t, a);
    EXPECT_DOUBLE_EQ(selent::improve_worse(cap + 1.0, t, a), cap);
    EXPECT_DOUBLE_EQ(selent::improve_worse(cap - 1.0, t, a), cap - 1.0);
    const double v = 1.1;
    const double bcap = selent::phi_star_better(v, a);
    EXPECT_DOUBLE_EQ(selent::improve_better(bcap + 1.0, v, a), bcap);
    EXPECT_DOUBLE_EQ(selent::improve_better(bcap + 1.0, 3.0, a), bcap + 1.0);
}

}  // namespace
