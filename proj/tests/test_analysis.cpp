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
#include <fstream>
#include <sstream>
#include <string>

#include "selent/analysis.hpp"

namespace {

using selent::Format;
using selent::SampleSet;

SampleSet load(const std::string& name) {
    std::ifstream in(std::string(SELENT_DATA_DIR) + "/" + name);
    EXPECT_TRUE(in.good()) << name;
    return selent::load_samples(in, Format::whitespace, name);
}

TEST(LoadSamples, AirConditioningData) {
    const auto a = load("plane_7913.txt");
    const auto b = load("plane_7914.txt");
    EXPECT_EQ(a.n(), 24u);
    EXPECT_EQ(b.n(), 24u);
    EXPECT_EQ(a.sum(), 1869.0);
    EXPECT_EQ(b.sum(), 1539.0);
    EXPECT_EQ(a.observations.front(), 97.0);
    EXPECT_EQ(a.observations.back(), 191.0);
}

TEST(LoadSamples, CsvAndComments) {
    std::istringstream in("# header\n1.5\n\n  # indented comment\n2,3\n4e1\n");
    const auto s = selent::load_samples(in, Format::csv);
    ASSERT_EQ(s.n(), 4u);
    EXPECT_EQ(s.observations[3], 40.0);
}

TEST(LoadSamples, ParseErrorLocatesToken) {
    std::istringstream in("1, 2, x");
    try {
        selent::load_samples(in, Format::csv);
        FAIL() << "expected ParseError";
    } catch (const selent::ParseError& e) {
        EXPECT_EQ(e.token(), 3u);
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 7u);
    }
    std::istringstream ws("1 2\n3 4q 5\n");
    try {
        selent::load_samples(ws, Format::whitespace);
        FAIL() << "expected ParseError";
    } catch (const selent::ParseError& e) {
        EXPECT_EQ(e.token(), 4u);
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 3u);
    }
}

TEST(LoadSamples, RejectsNonpositiveAndEmpty) {
    std::istringstream neg("1 -2 3");
    EXPECT_THROW(selent::load_samples(neg, Format::whitespace), selent::DataError);
    std::istringstream zero("0");
    EXPECT_THROW(selent::load_samples(zero, Format::whitespace), selent::DataError);
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(selent::load_samples(empty, Format::whitespace), selent::DataError);
}

TEST(KsGof, AirConditioningFitsExponential) {
    const auto a = selent::ks_gof(load("plane_7913.txt"), 1.0);
    const auto b = selent::ks_gof(load("plane_7914.txt"), 1.0);
    EXPECT_NEAR(a.scale_fitted, 77.875, 1e-12);
    EXPECT_NEAR(b.scale_fitted, 64.125, 1e-12);
    EXPECT_FALSE(a.reject_at_5pct);
    EXPECT_FALSE(b.reject_at_5pct);
    EXPECT_GE(a.ks_statistic, 0.0);
    EXPECT_LE(a.ks_statistic, 1.0);
}

TEST(KsGof, QuantileGridFitsClosely) {
    const int n = 200;
    SampleSet s{"grid", {}};
    for (int i = 1; i <= n; ++i) s.observations.push_back(-std::log(1.0 - (i - 0.5) / n));
    const auto f = selent::ks_gof(s, 1.0);
    // The fitted scale differs from 1 by O(log n / n), which adds a little to 1/(2n).
    EXPECT_LE(f.ks_statistic, 0.5 / n + 0.01);
    EXPECT_GT(f.ks_pvalue_approx, 0.99);
}

TEST(KsGof, RejectsWrongShape) {
    SampleSet s{"spiky", {}};
    for (int i = 0; i < 100; ++i) s.observations.push_back(1.0 + 0.001 * i);
    EXPECT_TRUE(selent::ks_gof(s, 1.0).reject_at_5pct);
}

TEST(Kolmogorov, SurvivalFunction) {
    EXPECT_NEAR(selent::kolmogorov_sf(1.3580986), 0.05, 1e-6);
    EXPECT_NEAR(selent::kolmogorov_sf(0.8275735), 0.5, 1e-6);
    EXPECT_DOUBLE_EQ(selent::kolmogorov_sf(0.0), 1.0);
    EXPECT_LT(selent::kolmogorov_sf(3.0), 1e-6);
    // The two series agree where they meet.
    EXPECT_NEAR(selent::kolmogorov_sf(std::nextafter(1.0, 0.0)), selent::kolmogorov_sf(1.0), 1e-12);
}

TEST(Analyze, EstimatesOnAirConditioningData) {
    const auto r = selent::analyze(load("plane_7913.txt"), load("plane_7914.txt"), 1.0);
    EXPECT_EQ(r.stats.x1(), 1869.0);
    EXPECT_EQ(r.stats.x2(), 1539.0);
    EXPECT_EQ(r.stats.alpha().value(), 24.0);
    EXPECT_EQ(r.outcome.s_index, 1);
    EXPECT_EQ(r.outcome.m_index, 2);
    EXPECT_NEAR(r.outcome.t, 1539.0 / 1869.0, 1e-15);
    const auto& w = r.worse_estimates;
    EXPECT_NEAR(w.at("delta_ln_alpha"), 4.355105, 5e-7);
    EXPECT_NEAR(w.at("delta_ln_alpha_plus_1"), 4.314283, 5e-7);
    EXPECT_NEAR(w.at("delta_psi_alpha"), 4.376083, 5e-7);
    EXPECT_NEAR(w.at("delta_S_ln_alpha"), 4.355105, 5e-7);
    EXPECT_NEAR(w.at("delta_S_ln_alpha_plus_1"), 4.314283, 5e-7);
    const auto& g = r.better_estimates;
    EXPECT_NEAR(g.at("d_ln_alpha"), 4.160834, 5e-7);
    EXPECT_NEAR(g.at("d_ln_alpha_plus_1"), 4.120012, 5e-7);
    EXPECT_NEAR(g.at("d_psi_alpha"), 4.181812, 5e-7);
    EXPECT_NEAR(g.at("d_S_ln_alpha"), 4.160834, 5e-7);
    EXPECT_NEAR(g.at("d_S_ln_alpha_alt_lambda"), 4.273133, 5e-7);
    EXPECT_NEAR(g.at("d_S_ln_alpha_plus_1_alt_lambda"), 4.273133, 5e-7);
    EXPECT_EQ(w.size(), 5u);
    EXPECT_EQ(g.size(), 7u);
    EXPECT_THROW(w.at("nope"), std::out_of_range);
}

TEST(Analyze, SwapScaleAndDifferenceProperties) {
    const auto a = load("plane_7913.txt");
    const auto b = load("plane_7914.txt");
    const auto r = selent::analyze(a, b, 1.0);
    const auto s = selent::analyze(b, a, 1.0);
    for (std::size_t i = 0; i < r.worse_estimates.size(); ++i) {
        EXPECT_EQ(r.worse_estimates.entries()[i].value, s.worse_estimates.entries()[i].value);
    }
    for (std::size_t i = 0; i < r.better_estimates.size(); ++i) {
        EXPECT_EQ(r.better_estimates.entries()[i].value, s.better_estimates.entries()[i].value);
    }
    EXPECT_NEAR(r.worse_estimates.at("delta_psi_alpha") - r.better_estimates.at("d_psi_alpha"),
                std::log(r.outcome.v), 1e-14);

    const double k = 0.37;
    SampleSet ka = a, kb = b;
    for (auto& x : ka.observations) x *= k;
    for (auto& x : kb.observations) x *= k;
    const auto scaled = selent::analyze(ka, kb, 1.0);
    for (std::size_t i = 0; i < r.worse_estimates.size(); ++i) {
        EXPECT_NEAR(scaled.worse_estimates.entries()[i].value, r.worse_estimates.entries()[i].value + std::log(k),
                    1e-12);
    }
}

TEST(Analyze, MismatchedShapesRejected) {
    SampleSet a{"a", {1, 2, 3}}, b{"b", {1, 2}};
    EXPECT_THROW(selent::analyze(a, b, 1.0), selent::DataError);
}

TEST(Analyze, FullEntropyAddsConstant) {
    const auto a = load("plane_7913.txt");
    const auto b = load("plane_7914.txt");
    const auto base = selent::analyze(a, b, 1.0);
    const auto full = selent::analyze(a, b, 1.0, {true, true});
    const double k = selent::entropy_constant(selent::Shape(24.0));
    EXPECT_NEAR(full.worse_estimates.at("delta_psi_alpha"), base.worse_estimates.at("delta_psi_alpha") + k, 1e-13);
    const auto no_alt = selent::analyze(a, b, 1.0, {false, false});
    EXPECT_EQ(no_alt.better_estimates.size(), 5u);
}

TEST(Analyze, ReportWriters) {
    const auto r = selent::analyze(load("plane_7913.txt"), load("plane_7914.txt"), 1.0);
    std::ostringstream text, csv;
    selent::write_report_text(text, r);
    selent::write_report_csv(csv, r);
    EXPECT_NE(text.str().find("X1 = 1869, X2 = 1539"), std::string::npos);
    EXPECT_NE(text.str().find("Lilliefors"), std::string::npos);
    EXPECT_EQ(csv.str().rfind("target,estimator,value\nworse,delta_ln_alpha,4.3551", 0), 0u);
}

}  // namespace
