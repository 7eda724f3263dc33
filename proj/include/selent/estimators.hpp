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

// Selection rule, selected-entropy targets and the estimator families.
//
// Every estimator here is scale equivariant, est(a·x) = est(x) + ln a, and
// permutation symmetric. The estimand is ln θ of the selected population;
// the known additive entropy constant is available separately.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <variant>

#include "selent/constants.hpp"
#include "selent/numerics.hpp"

namespace selent {

enum class Target { worse, better };

inline const char* to_string(Target t) { return t == Target::worse ? "worse" : "better"; }

/// The pair of per-population totals (X1, X2), each Gamma(α, θ_i).
class SufficientStat {
public:
    SufficientStat(double x1, double x2, Shape alpha) : x1_(x1), x2_(x2), alpha_(alpha) {
        if (!(x1 > 0.0) || !(x2 > 0.0) || !std::isfinite(x1) || !std::isfinite(x2)) {
            throw DomainError("sufficient statistic must be positive and finite");
        }
    }

    double x1() const noexcept { return x1_; }
    double x2() const noexcept { return x2_; }
    Shape alpha() const noexcept { return alpha_; }

    SufficientStat scaled(double a) const { return {a * x1_, a * x2_, alpha_}; }
    SufficientStat swapped() const { return {x2_, x1_, alpha_}; }

private:
    double x1_;
    double x2_;
    Shape alpha_;
};

class ScaleParams {
public:
    ScaleParams(double theta1, double theta2) : theta1_(theta1), theta2_(theta2) {
        if (!(theta1 > 0.0) || !(theta2 > 0.0) || !std::isfinite(theta1) || !std::isfinite(theta2)) {
            throw DomainError("scale parameters must be positive and finite");
        }
    }
    double theta1() const noexcept { return theta1_; }
    double theta2() const noexcept { return theta2_; }
    /// max/min ≥ 1
    double mu() const noexcept { return std::max(theta1_, theta2_) / std::min(theta1_, theta2_); }
    /// min/max ∈ (0, 1]
    double theta() const noexcept { return std::min(theta1_, theta2_) / std::max(theta1_, theta2_); }

private:
    double theta1_;
    double theta2_;
};

struct SelectionOutcome {
    double z1;    // min(x1, x2)
    double z2;    // max(x1, x2)
    double t;     // z1 / z2
    double v;     // z2 / z1
    int s_index;  // population selected as worse
    int m_index;  // population selected as better
};

/// Natural selection rule. Ties pick population 1 for both targets
/// (X1 ≥ X2 selects 1 as worse, X1 ≤ X2 selects 1 as better).
inline SelectionOutcome select(const SufficientStat& stat) {
    const double x1 = stat.x1();
    const double x2 = stat.x2();
    SelectionOutcome out{};
    out.z1 = std::min(x1, x2);
    out.z2 = std::max(x1, x2);
    out.t = out.z1 / out.z2;
    out.v = out.z2 / out.z1;
    out.s_index = x1 >= x2 ? 1 : 2;
    out.m_index = x1 <= x2 ? 1 : 2;
    return out;
}

/// Shannon entropy of Gamma(α, θ): ln θ + α + ln Γ(α) + (1 − α) ψ(α).
inline double entropy_gamma(double theta, Shape alpha) {
    detail::require_positive(theta, "entropy_gamma");
    const double a = alpha.value();
    return std::log(theta) + a + ln_gamma(a) + (1.0 - a) * digamma(a);
}

/// The θ-free part of entropy_gamma; add it to any ln θ estimate for a full entropy.
inline double entropy_constant(Shape alpha) { return entropy_gamma(1.0, alpha); }

/// ln θ of the population the rule selected for `target`.
inline double true_selected_entropy(const ScaleParams& params, const SufficientStat& stat, Target target) {
    const auto sel = select(stat);
    const int idx = target == Target::worse ? sel.s_index : sel.m_index;
    return std::log(idx == 1 ? params.theta1() : params.theta2());
}

// Estimator families. Worse-target estimators are ln Z2 − Φ(T); better-target
// ones are ln Z1 − φ(V).
struct NaiveWorse {
    double c;
};
struct GenBayesWorse {
    double beta;  // prior exponent, > −α
};
struct ShrinkWorse {
    double c;
};
struct NaiveBetter {
    double c;
};
struct GenBayesBetter {
    double beta;
};
struct ShrinkBetter {
    double c;
};
struct CustomWorse {
    std::function<double(double)> phi;  // Φ on (0, 1]
    std::string name = "custom";
};
struct CustomBetter {
    std::function<double(double)> phi;  // φ on [1, ∞)
    std::string name = "custom";
};

using EstimatorId = std::variant<NaiveWorse, GenBayesWorse, ShrinkWorse, NaiveBetter, GenBayesBetter, ShrinkBetter,
                                 CustomWorse, CustomBetter>;

inline Target target_of(const EstimatorId& id) {
    return std::visit(
        [](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, NaiveWorse> || std::is_same_v<E, GenBayesWorse> ||
                          std::is_same_v<E, ShrinkWorse> || std::is_same_v<E, CustomWorse>) {
                return Target::worse;
            } else {
                return Target::better;
            }
        },
        id);
}

inline std::string label(const EstimatorId& id) {
    return std::visit(
        [](const auto& e) -> std::string {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, NaiveWorse>) return "naive_worse(c=" + format_double(e.c) + ")";
            else if constexpr (std::is_same_v<E, GenBayesWorse>)
                return "genbayes_worse(beta=" + format_double(e.beta) + ")";
            else if constexpr (std::is_same_v<E, ShrinkWorse>) return "shrink_worse(c=" + format_double(e.c) + ")";
            else if constexpr (std::is_same_v<E, NaiveBetter>) return "naive_better(c=" + format_double(e.c) + ")";
            else if constexpr (std::is_same_v<E, GenBayesBetter>)
                return "genbayes_better(beta=" + format_double(e.beta) + ")";
            else if constexpr (std::is_same_v<E, ShrinkBetter>) return "shrink_better(c=" + format_double(e.c) + ")";
            else if constexpr (std::is_same_v<E, CustomWorse>) return "custom_worse(" + e.name + ")";
            else return "custom_better(" + e.name + ")";
        },
        id);
}

/// t at or above which ShrinkWorse(c) replaces ln Z2 − c by ln(X1+X2) − ψ(2α).
inline double shrink_worse_threshold(double c, Shape alpha) {
    return std::expm1(digamma(2.0 * alpha.value()) - c);
}

/// The improved function Φ_I at one t: φ*(t) where Φ(t) exceeds it, else Φ(t).
inline double improve_worse(double phi_value, double t, Shape alpha) {
    const double cap = phi_star_worse(t, alpha);
    return phi_value > cap ? cap : phi_value;
}

/// Better-target improvement: replaces φ(v) by φ*(v) only when φ(v) > φ*(v)
/// and v ≤ lambda_threshold(α).
inline double improve_better(double phi_value, double v, Shape alpha) {
    const double cap = phi_star_better(v, alpha);
    if (v <= lambda_threshold(alpha) && phi_value > cap) {
        return cap;
    }
    return phi_value;
}

/// Shrinkage for the better target with an explicit guard λ on V.
inline double shrink_better_estimate(const SufficientStat& stat, double c, double lambda) {
    const auto sel = select(stat);
    const double psi2a = digamma(2.0 * stat.alpha().value());
    if (sel.v >= 1.0 && sel.v <= lambda && sel.v > std::expm1(psi2a - c)) {
        return std::log(sel.z1 + sel.z2) - psi2a;
    }
    return std::log(sel.z1) - c;
}

namespace detail {

inline double gen_bayes_constant(double beta, Shape alpha) {
    const double shifted = alpha.value() + beta;
    if (!(shifted > 0.0)) {
        throw DomainError("generalized Bayes prior exponent must exceed -alpha, got beta=" + std::to_string(beta));
    }
    return digamma(shifted);
}

}  // namespace detail

/// Evaluates an estimator of the selected ln θ at `stat`.
inline double estimate(const SufficientStat& stat, const EstimatorId& id) {
    const auto sel = select(stat);
    const Shape alpha = stat.alpha();
    return std::visit(
        [&](const auto& e) -> double {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, NaiveWorse>) {
                return std::log(sel.z2) - e.c;
            } else if constexpr (std::is_same_v<E, GenBayesWorse>) {
                return std::log(sel.z2) - detail::gen_bayes_constant(e.beta, alpha);
            } else if constexpr (std::is_same_v<E, ShrinkWorse>) {
                if (sel.t < shrink_worse_threshold(e.c, alpha)) {
                    return std::log(sel.z2) - e.c;
                }
                return std::log(stat.x1() + stat.x2()) - digamma(2.0 * alpha.value());
            } else if constexpr (std::is_same_v<E, NaiveBetter>) {
                return std::log(sel.z1) - e.c;
            } else if constexpr (std::is_same_v<E, GenBayesBetter>) {
                return std::log(sel.z1) - detail::gen_bayes_constant(e.beta, alpha);
            } else if constexpr (std::is_same_v<E, ShrinkBetter>) {
                return shrink_better_estimate(stat, e.c, lambda_threshold(alpha));
            } else if constexpr (std::is_same_v<E, CustomWorse>) {
                return std::log(sel.z2) - e.phi(sel.t);
            } else {
                return std::log(sel.z1) - e.phi(sel.v);
            }
        },
        id);
}

}  // namespace selent
