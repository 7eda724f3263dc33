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

// Two-sample pipeline: load failure times, check a fixed-shape gamma fit,
// reduce to the sufficient statistic and report every estimator.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selent/errors.hpp"
#include "selent/estimators.hpp"

namespace selent {

struct SampleSet {
    std::string label;
    std::vector<double> observations;

    std::size_t n() const noexcept { return observations.size(); }
    double sum() const { return std::accumulate(observations.begin(), observations.end(), 0.0); }
};

enum class Format { whitespace, csv };

/// Reads positive reals. Lines whose first non-blank character is '#' are
/// comments. In csv mode commas also separate values.
inline SampleSet load_samples(std::istream& in, Format format, std::string label = "sample") {
    SampleSet out{std::move(label), {}};
    std::string line;
    std::size_t line_no = 0;
    std::size_t token_no = 0;
    auto is_sep = [format](char ch) {
        return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v' || (format == Format::csv && ch == ',');
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && is_sep(line[pos])) ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && !is_sep(line[end])) ++end;
            ++token_no;
            const std::string token = line.substr(pos, end - pos);
            double value = 0.0;
            const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
            if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
                throw ParseError("not a number: '" + token + "'", line_no, pos + 1, token_no);
            }
            if (!(value > 0.0) || !std::isfinite(value)) {
                throw DataError("observation " + std::to_string(token_no) + " on line " + std::to_string(line_no) +
                                " must be positive and finite, got " + token);
            }
            out.observations.push_back(value);
            pos = end;
        }
    }
    if (out.observations.empty()) throw DataError("no observations in " + out.label);
    return out;
}

struct FitReport {
    std::string label;
    double shape_assumed;
    double scale_fitted;
    double ks_statistic;
    double ks_pvalue_approx;
    bool reject_at_5pct;
};

/// Asymptotic Kolmogorov survival function P(K > x).
inline double kolmogorov_sf(double x) {
    if (!(x > 0.0)) return 1.0;
    if (x < 1.0) {
        // Small-x form of the CDF converges where the alternating series does not.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double j = 2.0 * k - 1.0;
            cdf += std::exp(-j * j * pi2 / (8.0 * x * x));
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sf = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(sf, 0.0, 1.0);
}

/// One-sample KS test against Gamma(shape, mean/shape). The p-value ignores
/// that the scale was fitted from the same data, so it is conservative.
inline FitReport ks_gof(const SampleSet& sample, double shape) {
    if (sample.n() == 0) throw DataError("ks_gof: empty sample");
    const Shape alpha(shape);
    const double n = static_cast<double>(sample.n());
    const double scale = sample.sum() / n / shape;
    std::vector<double> xs = sample.observations;
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = gamma_cdf(xs[i] / scale, alpha);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double p = kolmogorov_sf(std::sqrt(n) * d);
    return {sample.label, shape, scale, d, p, p < 0.05};
}

struct EstimateEntry {
    std::string key;      // ASCII identifier used in CSV
    std::string display;  // table heading
    double value;
};

class EstimateTable {
public:
    void add(std::string key, std::string display, double value) {
        entries_.push_back({std::move(key), std::move(display), value});
    }
    const std::vector<EstimateEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    double at(const std::string& key) const {
        for (const auto& e : entries_) {
            if (e.key == key) return e.value;
        }
        throw std::out_of_range("no estimate named " + key);
    }

private:
    std::vector<EstimateEntry> entries_;
};

struct AnalysisOptions {
    /// Also report shrinkage for the better target with λ computed from the
    /// per-observation shape rather than the shape of the totals.
    bool alternate_lambda = true;
    /// Add the known entropy constant so values are full entropies.
    bool full_entropy = false;
};

struct AnalysisReport {
    SufficientStat stats;
    SelectionOutcome outcome;
    double shape_per_obs;
    EstimateTable worse_estimates;
    EstimateTable better_estimates;
    FitReport fit_a;
    FitReport fit_b;
    std::string label_a;
    std::string label_b;
    double lambda_literal;
    double lambda_alternate;
    bool full_entropy;
};

/// Sufficient statistic x_i = Σ sample i with α = n·shape; both samples must give the same α.
inline AnalysisReport analyze(const SampleSet& a, const SampleSet& b, double shape_per_obs,
                              const AnalysisOptions& opts = {}) {
    const Shape per_obs(shape_per_obs);
    const double alpha_a = static_cast<double>(a.n()) * shape_per_obs;
    const double alpha_b = static_cast<double>(b.n()) * shape_per_obs;
    if (alpha_a != alpha_b) {
        throw DataError("samples imply different shapes for the totals (" + format_double(alpha_a) + " vs " +
                        format_double(alpha_b) + "); a common shape is required");
    }
    const Shape alpha(alpha_a);
    const SufficientStat stat(a.sum(), b.sum(), alpha);
    const double ln_a = std::log(alpha.value());
    const double ln_a1 = std::log1p(alpha.value());
    const double shift = opts.full_entropy ? entropy_constant(alpha) : 0.0;

    AnalysisReport r{stat, select(stat), shape_per_obs, {}, {}, ks_gof(a, shape_per_obs), ks_gof(b, shape_per_obs),
                     a.label, b.label, lambda_threshold(alpha), lambda_threshold(per_obs), opts.full_entropy};

    auto& w = r.worse_estimates;
    w.add("delta_ln_alpha", "δ_{ln α}", estimate(stat, NaiveWorse{ln_a}) + shift);
    w.add("delta_ln_alpha_plus_1", "δ_{ln(α+1)}", estimate(stat, NaiveWorse{ln_a1}) + shift);
    w.add("delta_psi_alpha", "δ_{ψ(α)}", estimate(stat, GenBayesWorse{0.0}) + shift);
    w.add("delta_S_ln_alpha", "δ^(S)_{ln α}", estimate(stat, ShrinkWorse{ln_a}) + shift);
    w.add("delta_S_ln_alpha_plus_1", "δ^(S)_{ln(α+1)}", estimate(stat, ShrinkWorse{ln_a1}) + shift);

    auto& g = r.better_estimates;
    g.add("d_ln_alpha", "d_{ln α}", estimate(stat, NaiveBetter{ln_a}) + shift);
    g.add("d_ln_alpha_plus_1", "d_{ln(α+1)}", estimate(stat, NaiveBetter{ln_a1}) + shift);
    g.add("d_psi_alpha", "d_{ψ(α)}", estimate(stat, GenBayesBetter{0.0}) + shift);
    g.add("d_S_ln_alpha", "d^(S)_{ln α}", estimate(stat, ShrinkBetter{ln_a}) + shift);
    g.add("d_S_ln_alpha_plus_1", "d^(S)_{ln(α+1)}", estimate(stat, ShrinkBetter{ln_a1}) + shift);
    if (opts.alternate_lambda) {
        g.add("d_S_ln_alpha_alt_lambda", "d^(S)_{ln α} [alt λ]",
              shrink_better_estimate(stat, ln_a, r.lambda_alternate) + shift);
        g.add("d_S_ln_alpha_plus_1_alt_lambda", "d^(S)_{ln(α+1)} [alt λ]",
              shrink_better_estimate(stat, ln_a1, r.lambda_alternate) + shift);
    }
    return r;
}

namespace detail {

inline std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace detail

inline void write_report_text(std::ostream& os, const AnalysisReport& r) {
    os << "Samples: " << r.label_a << " (population 1), " << r.label_b << " (population 2)\n";
    os << "Shape per observation: " << format_double(r.shape_per_obs)
       << ", shape of totals: " << format_double(r.stats.alpha().value()) << "\n\n";
    os << "Goodness of fit (Kolmogorov-Smirnov, fixed shape, ML scale)\n";
    for (const FitReport* f : {&r.fit_a, &r.fit_b}) {
        os << "  " << f->label << ": scale " << detail::fixed(f->scale_fitted, 4) << ", D = "
           << detail::fixed(f->ks_statistic, 6) << ", p ~ " << detail::fixed(f->ks_pvalue_approx, 4) << ", "
           << (f->reject_at_5pct ? "reject" : "do not reject") << " at 5%\n";
    }
    os << "  note: p-values use the asymptotic Kolmogorov law and ignore the fitted scale (Lilliefors effect)\n\n";
    os << "X1 = " << format_double(r.stats.x1()) << ", X2 = " << format_double(r.stats.x2()) << "\n";
    os << "Z1 = " << format_double(r.outcome.z1) << ", Z2 = " << format_double(r.outcome.z2) << "\n";
    os << "T = " << detail::fixed(r.outcome.t, 7) << ", V = " << detail::fixed(r.outcome.v, 7) << "\n";
    os << "Selected as worse: population " << r.outcome.s_index << ", as better: population " << r.outcome.m_index
       << "\n";
    os << "lambda = " << detail::fixed(r.lambda_literal, 6) << " (shape of totals), alt lambda = "
       << detail::fixed(r.lambda_alternate, 6) << " (shape per observation)\n\n";
    const char* scale = r.full_entropy ? "full entropy" : "log scale";
    os << "Worse population estimates (" << scale << ")\n";
    for (const auto& e : r.worse_estimates.entries()) {
        os << "  " << e.display << " = " << detail::fixed(e.value, 6) << "\n";
    }
    os << "\nBetter population estimates (" << scale << ")\n";
    for (const auto& e : r.better_estimates.entries()) {
        os << "  " << e.display << " = " << detail::fixed(e.value, 6) << "\n";
    }
}

inline void write_report_csv(std::ostream& os, const AnalysisReport& r) {
    os << "target,estimator,value\n";
    for (const auto& e : r.worse_estimates.entries()) os << "worse," << e.key << ',' << format_double(e.value) << '\n';
    for (const auto& e : r.better_estimates.entries()) {
        os << "better," << e.key << ',' << format_double(e.value) << '\n';
    }
}

}  // namespace selent
