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

// Empirical risk of selected-entropy estimators.
//
// Replication r at grid index g draws from PhiloxStream(seed, g, r), so every
// estimator in a run sees the same (X1, X2) (common random numbers) and the
// output does not depend on how work is split across threads. Replications
// are reduced in fixed blocks of kBlockSize, and blocks are merged in index
// order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "selent/errors.hpp"
#include "selent/estimators.hpp"
#include "selent/rng.hpp"

namespace selent {

inline constexpr std::uint64_t kDefaultSeed = 20260417;
inline constexpr std::size_t kDefaultReps = 60000;

/// Grid {1, 1.25, ..., 10}.
inline std::vector<double> default_mu_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 36; ++i) grid.push_back(1.0 + 0.25 * i);
    return grid;
}

struct SimConfig {
    Shape alpha{1.0};
    /// μ ≥ 1 for the worse target, θ ∈ (0, 1] for the better target.
    std::vector<double> grid;
    std::size_t reps = kDefaultReps;
    std::uint64_t seed = kDefaultSeed;
    std::vector<EstimatorId> estimators;
    Target target = Target::worse;
    /// Common scale multiplier a: populations get (a, aμ) or (aθ, a).
    double base_scale = 1.0;
    /// Exchange the two populations' scales.
    bool swap_populations = false;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 1;

    void validate() const {
        if (reps < 1) throw ConfigError("reps must be at least 1");
        if (grid.empty()) throw ConfigError("grid must not be empty");
        for (double g : grid) {
            const bool ok = target == Target::worse ? (std::isfinite(g) && g >= 1.0) : (g > 0.0 && g <= 1.0);
            if (!ok) {
                throw ConfigError(std::string("grid value ") + format_double(g) + " outside the " +
                                  (target == Target::worse ? "mu >= 1" : "theta in (0, 1]") + " domain");
            }
        }
        if (!(base_scale > 0.0) || !std::isfinite(base_scale)) throw ConfigError("base_scale must be positive");
        for (const auto& e : estimators) {
            if (target_of(e) != target) {
                throw ConfigError("estimator " + label(e) + " does not estimate the " + to_string(target) + " target");
            }
        }
    }

    ScaleParams scales_at(double g) const {
        double t1 = target == Target::worse ? base_scale : base_scale * g;
        double t2 = target == Target::worse ? base_scale * g : base_scale;
        if (swap_populations) std::swap(t1, t2);
        return {t1, t2};
    }

    /// The scale ratio max/min at grid value g.
    double mu_at(double g) const { return target == Target::worse ? g : 1.0 / g; }
};

struct RiskPoint {
    double grid_value;
    double mu;
    EstimatorId estimator;
    std::string label;
    double mse;
    double mse_se;
    double bias;  // signed mean error
    double abs_bias;
    double bias_se;
    std::size_t reps;
};

struct DominancePoint {
    double grid_value;
    double mu;
    double mse_a;
    double mse_b;
    double diff;     // mean of (err_a² − err_b²)
    double diff_se;
    bool flagged;    // a's MSE exceeds b's by more than 3 SE
};

struct DominanceReport {
    std::string label_a;
    std::string label_b;
    std::vector<DominancePoint> points;

    bool any_flagged() const {
        return std::any_of(points.begin(), points.end(), [](const DominancePoint& p) { return p.flagged; });
    }
};

/// Mean and centered second moment, mergeable (Chan et al.).
struct RunningMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningMoments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double total = na + nb;
        const double d = o.mean - mean;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double standard_error() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

namespace detail {

inline constexpr std::size_t kBlockSize = 1000;

struct BlockMoments {
    std::vector<RunningMoments> err;
    std::vector<RunningMoments> sq;
    RunningMoments pair_diff;  // err_0² − err_1²

    explicit BlockMoments(std::size_t k = 0) : err(k), sq(k) {}

    void merge(const BlockMoments& o) {
        for (std::size_t i = 0; i < err.size(); ++i) {
            err[i].merge(o.err[i]);
            sq[i].merge(o.sq[i]);
        }
        pair_diff.merge(o.pair_diff);
    }
};

inline BlockMoments simulate_block(const SimConfig& cfg, std::size_t grid_index, std::size_t first, std::size_t last) {
    const std::size_t k = cfg.estimators.size();
    BlockMoments out(k);
    const ScaleParams params = cfg.scales_at(cfg.grid[grid_index]);
    std::vector<double> sq(k);
    for (std::size_t r = first; r < last; ++r) {
        PhiloxStream rng(cfg.seed, grid_index, r);
        const double x1 = sample_gamma(cfg.alpha, params.theta1(), rng);
        const double x2 = sample_gamma(cfg.alpha, params.theta2(), rng);
        const SufficientStat stat(x1, x2, cfg.alpha);
        const double truth = true_selected_entropy(params, stat, cfg.target);
        for (std::size_t i = 0; i < k; ++i) {
            const double e = estimate(stat, cfg.estimators[i]) - truth;
            sq[i] = e * e;
            out.err[i].add(e);
            out.sq[i].add(sq[i]);
        }
        if (k >= 2) out.pair_diff.add(sq[0] - sq[1]);
    }
    return out;
}

/// Per-grid-point moments; the (grid, block) tasks run on cfg.threads workers.
inline std::vector<BlockMoments> simulate_moments(const SimConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.estimators.size();
    const std::size_t blocks = (cfg.reps + kBlockSize - 1) / kBlockSize;
    const std::size_t tasks = cfg.grid.size() * blocks;
    std::vector<BlockMoments> partial(tasks, BlockMoments(k));

    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));

    std::size_t next = 0;
    std::mutex mtx;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            std::size_t task;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= tasks || failure) return;
                task = next++;
            }
            const std::size_t g = task / blocks;
            const std::size_t b = task % blocks;
            try {
                partial[task] = simulate_block(cfg, g, b * kBlockSize, std::min(cfg.reps, (b + 1) * kBlockSize));
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<BlockMoments> merged(cfg.grid.size(), BlockMoments(k));
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
        for (std::size_t b = 0; b < blocks; ++b) merged[g].merge(partial[g * blocks + b]);
    }
    return merged;
}

}  // namespace detail

/// One RiskPoint per (grid value, estimator), grid-major.
inline std::vector<RiskPoint> simulate_risk(const SimConfig& cfg) {
    const auto moments = detail::simulate_moments(cfg);
    std::vector<RiskPoint> out;
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
        for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
            const auto& err = moments[g].err[i];
            const auto& sq = moments[g].sq[i];
            out.push_back({cfg.grid[g], cfg.mu_at(cfg.grid[g]), cfg.estimators[i], label(cfg.estimators[i]), sq.mean,
                           sq.standard_error(), err.mean, std::abs(err.mean), err.standard_error(), err.n});
        }
    }
    return out;
}

/// Paired comparison of a against b. A point is flagged when a, the
/// candidate dominator, has MSE larger than b's by more than 3 SE.
inline DominanceReport dominance_report(const SimConfig& cfg, const EstimatorId& a, const EstimatorId& b) {
    SimConfig run = cfg;
    run.estimators = {a, b};
    const auto moments = detail::simulate_moments(run);
    DominanceReport report{label(a), label(b), {}};
    for (std::size_t g = 0; g < run.grid.size(); ++g) {
        const auto& m = moments[g];
        const double se = m.pair_diff.standard_error();
        report.points.push_back({run.grid[g], run.mu_at(run.grid[g]), m.sq[0].mean, m.sq[1].mean, m.pair_diff.mean,
                                 se, m.pair_diff.mean > 3.0 * se});
    }
    return report;
}

inline constexpr const char* kRiskCsvHeader = "target,alpha,mu,estimator_label,mse,mse_se,abs_bias,bias_se,reps,seed";

namespace detail {

/// Labels contain commas, so they are always quoted.
inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

/// The mu column is the scale ratio max/min for both targets.
inline void write_risk_csv(std::ostream& os, const SimConfig& cfg, const std::vector<RiskPoint>& points) {
    os << kRiskCsvHeader << '\n';
    for (const auto& p : points) {
        os << to_string(cfg.target) << ',' << format_double(cfg.alpha.value()) << ',' << format_double(p.mu) << ','
           << detail::csv_quote(p.label) << ',' << format_double(p.mse) << ',' << format_double(p.mse_se) << ','
           << format_double(p.abs_bias) << ',' << format_double(p.bias_se) << ',' << p.reps << ',' << cfg.seed
           << '\n';
    }
}

inline constexpr const char* kDominanceCsvHeader =
    "target,alpha,mu,estimator_a,estimator_b,mse_a,mse_b,diff,diff_se,flagged,reps,seed";

inline void write_dominance_csv(std::ostream& os, const SimConfig& cfg, const DominanceReport& report) {
    os << kDominanceCsvHeader << '\n';
    for (const auto& p : report.points) {
        os << to_string(cfg.target) << ',' << format_double(cfg.alpha.value()) << ',' << format_double(p.mu) << ','
           << detail::csv_quote(report.label_a) << ',' << detail::csv_quote(report.label_b) << ','
           << format_double(p.mse_a) << ',' << format_double(p.mse_b) << ',' << format_double(p.diff) << ','
           << format_double(p.diff_se) << ',' << (p.flagged ? 1 : 0) << ',' << cfg.reps << ',' << cfg.seed << '\n';
    }
}

}  // namespace selent
