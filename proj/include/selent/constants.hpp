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

// Shape-indexed constants that bound the admissible naive estimators, the
// conditional kernels behind the shrinkage rules, and the constants table.
//
// Notation: Y1, Y2 iid Gamma(α, 1), G = cdf, g = pdf, Q = 1 - G.
//   worse target:  U  = ln Z2 - ln θ_S,  μ = max scale / min scale ≥ 1
//   better target: U1 = ln Z1 - ln θ_M,  θ = min scale / max scale ∈ (0, 1]

#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "selent/numerics.hpp"

namespace selent {

/// Default quadrature for the constants: tight enough that c2 + c3 = 2ψ(α)
/// holds to 1e-9 down to α = 0.1, where |c3| is near 15.
inline constexpr QuadratureConfig kConstantsQuadrature{1e-13, 1e-13, 4000};

namespace detail {

inline double mass_split(Shape alpha) { return std::max(1.0, alpha.value()); }

inline void require_mu(double mu, const char* fn) {
    if (!(mu >= 1.0) || !std::isfinite(mu)) {
        throw DomainError(std::string(fn) + ": ratio mu must satisfy mu >= 1, got " + std::to_string(mu));
    }
}

inline void require_unit(double t, const char* fn) {
    if (!(t > 0.0 && t <= 1.0)) {
        throw DomainError(std::string(fn) + ": argument must lie in (0, 1], got " + std::to_string(t));
    }
}

inline double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (std::isinf(m) && m < 0.0) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Convex combination w·lo + (1-w)·hi with w = p^{2α}/(p^{2α} + q^{2α}),
// evaluated from ln p and ln q without forming the powers.
inline double log_weighted_mix(double ln_p, double ln_q, double two_alpha, double lo, double hi) {
    const double w = 1.0 / (1.0 + std::exp(two_alpha * (ln_q - ln_p)));
    return w * lo + (1.0 - w) * hi;
}

}  // namespace detail

/// Infimum over μ of the risk-minimizing constant c*(μ): ψ(α).
inline double c1(Shape alpha) { return digamma(alpha.value()); }

/// E ln max(Y1, Y2) = 2 ∫ ln z G(z) g(z) dz, the supremum of c*(μ).
inline double c2(Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    auto f = [alpha](double z) { return std::log(z) * gamma_cdf(z, alpha) * gamma_pdf(z, alpha); };
    return 2.0 * integrate_halfline(f, cfg, detail::mass_split(alpha));
}

/// E ln min(Y1, Y2) = 2 ∫ ln z Q(z) g(z) dz, the infimum of the better-target c*(θ).
inline double c3(Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    auto f = [alpha](double z) { return std::log(z) * gamma_sf(z, alpha) * gamma_pdf(z, alpha); };
    return 2.0 * integrate_halfline(f, cfg, detail::mass_split(alpha));
}

/// Upper end of the generalized Bayes admissible range: ψ⁻¹(c2(α)) − α ∈ (0, α).
inline double beta0(Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    return inv_digamma(c2(alpha, cfg)) - alpha.value();
}

/// Lower end for the better target: ψ⁻¹(c3(α)) − α ∈ (−α, 0).
inline double beta1(Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    return inv_digamma(c3(alpha, cfg)) - alpha.value();
}

/// c*(μ) = E[ln Z2 − ln θ_S], the constant minimizing the naive risk at μ.
/// Decreasing from c2(α) at μ = 1 to ψ(α) as μ → ∞.
inline double c_star_worse(double mu, Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    detail::require_mu(mu, "c_star_worse");
    auto f = [alpha, mu](double z) {
        return std::log(z) * (gamma_cdf(z / mu, alpha) + gamma_cdf(mu * z, alpha)) * gamma_pdf(z, alpha);
    };
    return integrate_halfline(f, cfg, detail::mass_split(alpha));
}

/// Closed-form dc*/dμ = −Γ(2α) μ^{α−1} ln μ / (Γ(α)² (1+μ)^{2α}).
inline double c_star_worse_slope(double mu, Shape alpha) {
    detail::require_mu(mu, "c_star_worse_slope");
    const double a = alpha.value();
    const double log_mag = ln_gamma(2.0 * a) - 2.0 * ln_gamma(a) + (a - 1.0) * std::log(mu) -
                           2.0 * a * std::log1p(mu);
    return -std::exp(log_mag) * std::log(mu);
}

/// c*(θ) = E[ln Z1 − ln θ_M]. Decreasing from ψ(α) as θ → 0 to c3(α) at θ = 1.
inline double c_star_better(double theta, Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    detail::require_unit(theta, "c_star_better");
    auto f = [alpha, theta](double z) {
        return std::log(z) * (gamma_sf(theta * z, alpha) + gamma_sf(z / theta, alpha)) * gamma_pdf(z, alpha);
    };
    return integrate_halfline(f, cfg, detail::mass_split(alpha));
}

/// k_t(μ): weighted mean of ln(1 + t/μ) and ln(1 + tμ) with weights
/// proportional to (1+tμ)^{2α} and (μ+t)^{2α}. Its infimum over μ ≥ 1 is ln(1+t).
inline double k_worse(double t, double mu, Shape alpha) {
    detail::require_unit(t, "k_worse");
    detail::require_mu(mu, "k_worse");
    return detail::log_weighted_mix(std::log1p(t * mu), std::log(mu + t), 2.0 * alpha.value(),
                                    std::log1p(t / mu), std::log1p(t * mu));
}

/// k_v(θ), the better-target counterpart. Diverges as θ → 0; its infimum over
/// θ ∈ (0, 1] is ln(1+v) when v ≤ lambda_threshold(α).
inline double k_better(double v, double theta, Shape alpha) {
    if (!(v >= 1.0) || !std::isfinite(v)) {
        throw DomainError("k_better: v must satisfy v >= 1");
    }
    detail::require_unit(theta, "k_better");
    return detail::log_weighted_mix(std::log1p(v * theta), std::log(theta + v), 2.0 * alpha.value(),
                                    std::log1p(v / theta), std::log1p(v * theta));
}

/// min{1 + 1/(2α), 1 + √3}
inline double lambda_threshold(Shape alpha) {
    return std::min(1.0 + 1.0 / (2.0 * alpha.value()), 1.0 + std::numbers::sqrt3);
}

/// Φ*(t) = sup_μ Φ_μ(t) = ψ(2α) − ln(1+t).
inline double phi_star_worse(double t, Shape alpha) {
    detail::require_unit(t, "phi_star_worse");
    return digamma(2.0 * alpha.value()) - std::log1p(t);
}

/// φ*(v) = ψ(2α) − ln(1+v).
inline double phi_star_better(double v, Shape alpha) {
    if (!(v >= 1.0)) {
        throw DomainError("phi_star_better: v must satisfy v >= 1");
    }
    return digamma(2.0 * alpha.value()) - std::log1p(v);
}

namespace detail {

// Two-term density shared by both conditional pdfs: ratio r plays μ (worse) or
// θ (better), s plays t or v. Terms are evaluated in log space.
inline double two_term_log_gamma_pdf(double u, double s, double r, double a) {
    const double ln_r = std::log(r);
    const double rate_lo = 1.0 + s / r;
    const double rate_hi = 1.0 + s * r;
    const double eu = std::exp(u);
    const double num = log_sum_exp(-a * ln_r + 2.0 * a * u - rate_lo * eu, a * ln_r + 2.0 * a * u - rate_hi * eu);
    const double den = ln_gamma(2.0 * a) +
                       log_sum_exp(-a * ln_r - 2.0 * a * std::log(rate_lo), a * ln_r - 2.0 * a * std::log(rate_hi));
    return std::exp(num - den);
}

}  // namespace detail

/// Conditional density of U = ln Z2 − ln θ_S given T = t, at ratio μ.
/// Its mean is ψ(2α) − k_worse(t, μ, α).
inline double conditional_pdf_worse(double u, double t, double mu, Shape alpha) {
    detail::require_unit(t, "conditional_pdf_worse");
    detail::require_mu(mu, "conditional_pdf_worse");
    if (std::isnan(u)) throw DomainError("conditional_pdf_worse: u is NaN");
    return detail::two_term_log_gamma_pdf(u, t, mu, alpha.value());
}

/// Conditional density of U1 = ln Z1 − ln θ_M given V = v, at ratio θ.
/// Its mean is ψ(2α) − k_better(v, θ, α).
inline double conditional_pdf_better(double u, double v, double theta, Shape alpha) {
    if (!(v >= 1.0)) throw DomainError("conditional_pdf_better: v must satisfy v >= 1");
    detail::require_unit(theta, "conditional_pdf_better");
    if (std::isnan(u)) throw DomainError("conditional_pdf_better: u is NaN");
    return detail::two_term_log_gamma_pdf(u, v, theta, alpha.value());
}

struct ConstantsRow {
    double alpha;
    double c1;
    double c2;
    double c3;
    double ln_alpha;
    double ln_alpha_plus_1;
    double beta0;
    double beta1;
    double psi2a_minus_ln2;
};

inline ConstantsRow constants_row(Shape alpha, const QuadratureConfig& cfg = kConstantsQuadrature) {
    const double a = alpha.value();
    ConstantsRow row{};
    row.alpha = a;
    row.c1 = c1(alpha);
    row.c2 = c2(alpha, cfg);
    row.c3 = c3(alpha, cfg);
    row.ln_alpha = std::log(a);
    row.ln_alpha_plus_1 = std::log1p(a);
    row.beta0 = inv_digamma(row.c2) - a;
    row.beta1 = inv_digamma(row.c3) - a;
    row.psi2a_minus_ln2 = digamma(2.0 * a) - std::numbers::ln2;
    return row;
}

/// The α values of the published constants table, including the two crossover rows.
inline std::vector<double> default_table_alphas() {
    return {0.2, 0.4, 0.6, 0.63, 0.8, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 6.05, 6.5, 7, 8, 9, 10,
            12, 15, 16, 18, 20};
}

inline std::vector<ConstantsRow> generate_table(const std::vector<double>& alphas, const QuadratureConfig& cfg = kConstantsQuadrature) {
    std::vector<ConstantsRow> rows;
    rows.reserve(alphas.size());
    for (double a : alphas) {
        rows.push_back(constants_row(Shape(a), cfg));
    }
    return rows;
}

/// Shortest decimal that round-trips (at most 17 significant digits).
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline constexpr const char* kConstantsCsvHeader =
    "alpha,c1,c2,c3,ln_alpha,ln_alpha_plus_1,beta0,beta1,psi2a_minus_ln2";

inline void write_constants_csv(std::ostream& os, const std::vector<ConstantsRow>& rows) {
    os << kConstantsCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.alpha) << ',' << format_double(r.c1) << ',' << format_double(r.c2) << ','
           << format_double(r.c3) << ',' << format_double(r.ln_alpha) << ',' << format_double(r.ln_alpha_plus_1)
           << ',' << format_double(r.beta0) << ',' << format_double(r.beta1) << ','
           << format_double(r.psi2a_minus_ln2) << '\n';
    }
}

}  // namespace selent
