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

// Special functions, half-line quadrature and bracketed root finding.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "selent/errors.hpp"

namespace selent {

/// Gamma shape parameter. Always positive and finite.
class Shape {
public:
    explicit Shape(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw DomainError("gamma shape must be positive and finite, got " + std::to_string(alpha));
        }
    }
    double value() const noexcept { return alpha_; }

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    double alpha_;
};

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
            throw DomainError("quadrature tolerances must be positive and max_subdivisions >= 1");
        }
    }
};

namespace detail {

inline void require_positive(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(fn) + ": argument must be positive and finite, got " + std::to_string(x));
    }
}

// Recurrence shift target for the asymptotic expansions below; at 10 the
// first omitted Bernoulli term is below 1e-16.
inline constexpr double kAsymptoticStart = 10.0;

}  // namespace detail

/// ln Γ(x) for x > 0, by upward recurrence and the Stirling series.
inline double ln_gamma(double x) {
    detail::require_positive(x, "ln_gamma");
    double shift = 0.0;
    if (x < detail::kAsymptoticStart) {
        double prod = 1.0;
        while (x < detail::kAsymptoticStart) {
            prod *= x;
            x += 1.0;
        }
        shift = std::log(prod);
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1}).
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
    constexpr double half_ln_2pi = 0.91893853320467274178032973640562;
    return (x - 0.5) * std::log(x) - x + half_ln_2pi + series - shift;
}

/// Digamma ψ(x) = Γ'(x)/Γ(x) for x > 0.
inline double digamma(double x) {
    detail::require_positive(x, "digamma");
    double acc = 0.0;
    while (x < detail::kAsymptoticStart) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 -
                                                inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 / x - series;
}

/// Trigamma ψ'(x) for x > 0.
inline double trigamma(double x) {
    detail::require_positive(x, "trigamma");
    double acc = 0.0;
    while (x < detail::kAsymptoticStart) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 -
                                         inv2 * (1.0 / 30.0 -
                                                 inv2 * (1.0 / 42.0 -
                                                         inv2 * (1.0 / 30.0 -
                                                                 inv2 * (5.0 / 66.0 -
                                                                         inv2 * (691.0 / 2730.0 -
                                                                                 inv2 * (7.0 / 6.0)))))))));
    return acc + series;
}

/// Inverse of the digamma function on (0, ∞). Defined for every finite y.
inline double inv_digamma(double y) {
    if (!std::isfinite(y)) {
        throw DomainError("inv_digamma: argument must be finite");
    }
    constexpr double euler_gamma = std::numbers::egamma;
    double x = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + euler_gamma);
    for (int iter = 0; iter < 100; ++iter) {
        const double step = (digamma(x) - y) / trigamma(x);
        double next = x - step;
        if (next <= 0.0) {
            next = 0.5 * x;
        }
        const bool done = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * next;
        x = next;
        if (done) {
            break;
        }
    }
    return x;
}

namespace detail {

// Lower series for P(a, x), valid for x < a + 1. Returns the sum without the
// prefactor x^a e^-x / Γ(a+1).
inline double gamma_p_series(double a, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            return sum;
        }
    }
    throw NumericalError("incomplete gamma series did not converge");
}

// Continued fraction for Q(a, x), modified Lentz. Returns the fraction without
// the prefactor x^a e^-x / Γ(a).
inline double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 3e-16) {
            return h;
        }
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

inline void require_cdf_args(double z, double alpha, const char* fn) {
    if (!(z >= 0.0) || std::isnan(z)) {
        throw DomainError(std::string(fn) + ": argument must be nonnegative");
    }
    require_positive(alpha, fn);
}

}  // namespace detail

/// Regularized lower incomplete gamma P(α, z), i.e. the Gamma(α, 1) cdf.
inline double gamma_cdf(double z, Shape alpha) {
    const double a = alpha.value();
    detail::require_cdf_args(z, a, "gamma_cdf");
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    const double log_prefix = a * std::log(z) - z - ln_gamma(a);
    if (z < a + 1.0) {
        return std::exp(log_prefix - std::log(a)) * detail::gamma_p_series(a, z);
    }
    return 1.0 - std::exp(log_prefix) * detail::gamma_q_fraction(a, z);
}

/// Regularized upper incomplete gamma Q(α, z) = 1 − P(α, z), without cancellation.
inline double gamma_sf(double z, Shape alpha) {
    const double a = alpha.value();
    detail::require_cdf_args(z, a, "gamma_sf");
    if (z == 0.0) return 1.0;
    if (std::isinf(z)) return 0.0;
    const double log_prefix = a * std::log(z) - z - ln_gamma(a);
    if (z < a + 1.0) {
        return 1.0 - std::exp(log_prefix - std::log(a)) * detail::gamma_p_series(a, z);
    }
    return std::exp(log_prefix) * detail::gamma_q_fraction(a, z);
}

/// Gamma(α, 1) density.
inline double gamma_pdf(double z, Shape alpha) {
    const double a = alpha.value();
    detail::require_cdf_args(z, a, "gamma_pdf");
    if (z == 0.0) {
        if (a < 1.0) return std::numeric_limits<double>::infinity();
        return a == 1.0 ? 1.0 : 0.0;
    }
    if (std::isinf(z)) return 0.0;
    return std::exp((a - 1.0) * std::log(z) - z - ln_gamma(a));
}

namespace detail {

struct RuleResult {
    double value;
    double error;
};

// Gauss–Kronrod 21-point rule on [a, b] with the QUADPACK error heuristic.
template <class F>
RuleResult gauss_kronrod21(const F& f, double a, double b) {
    static constexpr std::array<double, 11> xgk = {
        0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
        0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
        0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
        0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
        0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
        0.000000000000000000000000000000000};
    static constexpr std::array<double, 11> wgk = {
        0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
        0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
        0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
        0.123491976262065851077600525278850, 0.134709217311473325928054001771707,
        0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
        0.149445554002916905664936468389821};
    // Gauss weights for the odd-indexed Kronrod abscissae.
    static constexpr std::array<double, 5> wg = {
        0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
        0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
        0.295524224714752870173892994651338};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * wgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> fv1{};
    std::array<double, 10> fv2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * xgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) {
            resg += wg[j / 2] * (f1 + f2);
        }
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }
    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {result, err};
}

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// Globally adaptive bisection over the initial breakpoints; the segment with
// the largest error estimate is split first.
template <class F>
double adaptive_integrate(const F& f, const std::vector<double>& breakpoints, const QuadratureConfig& cfg) {
    cfg.validate();
    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const auto r = gauss_kronrod21(f, breakpoints[i], breakpoints[i + 1]);
        heap.push({breakpoints[i], breakpoints[i + 1], r.value, r.error});
        total += r.value;
        total_err += r.error;
    }
    std::vector<Segment> frozen;  // too narrow to split further
    int subdivisions = 0;
    auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (heap.empty() || subdivisions >= cfg.max_subdivisions) {
            throw QuadratureError("adaptive quadrature failed to converge after " + std::to_string(subdivisions) +
                                      " subdivisions (error estimate " + std::to_string(total_err) + ")",
                                  total, total_err);
        }
        const Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            frozen.push_back(s);
            continue;
        }
        const auto left = gauss_kronrod21(f, s.a, mid);
        const auto right = gauss_kronrod21(f, mid, s.b);
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        heap.push({s.a, mid, left.value, left.error});
        heap.push({mid, s.b, right.value, right.error});
        ++subdivisions;
    }
    // Re-sum in a fixed order to shed the drift of the running updates.
    double sum = 0.0;
    std::vector<Segment> all(frozen.begin(), frozen.end());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    for (const auto& s : all) sum += s.value;
    return sum;
}

}  // namespace detail

/// ∫ f over a finite interval [a, b].
template <class F>
double integrate_interval(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
    return detail::adaptive_integrate(f, {a, b}, cfg);
}

/// ∫₀^∞ f(z) dz. The range is split at `split` (default 1); the tail is
/// mapped through z = split/u so both halves live on (0, 1], and integrable
/// singularities at the origin are resolved by bisection toward 0. Pick
/// `split` near where the integrand's mass sits. Throws QuadratureError when
/// the tolerance cannot be met within cfg.max_subdivisions.
template <class F>
double integrate_halfline(const F& f, const QuadratureConfig& cfg = {}, double split = 1.0) {
    detail::require_positive(split, "integrate_halfline");
    // s in (0, 1]: z = split*s; s in (1, 2): u = 2 - s, z = split/u, dz = split du/u^2.
    auto folded = [&f, split](double s) -> double {
        if (s <= 1.0) {
            return split * f(split * s);
        }
        const double u = 2.0 - s;
        const double z = split / u;
        if (!std::isfinite(z)) return 0.0;
        const double v = f(z);
        return v == 0.0 ? 0.0 : split * v / (u * u);
    };
    return detail::adaptive_integrate(folded, {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}, cfg);
}

/// Root of g on [lo, hi]. Requires g(lo)·g(hi) ≤ 0; returns x with
/// |g(x)| ≤ 1e-10 or a final bracket narrower than 1e-12.
template <class G>
double find_root(const G& g, double lo, double hi) {
    if (!(lo <= hi)) {
        throw BracketError("find_root: bracket must satisfy lo <= hi");
    }
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (std::signbit(glo) == std::signbit(ghi)) {
        throw BracketError("find_root: function has the same sign at both ends of [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    }
    std::uintmax_t max_iter = 500;
    const auto bracket = boost::math::tools::toms748_solve(
        g, lo, hi, glo, ghi,
        [](double a, double b) { return std::abs(b - a) <= 1e-12 || std::abs(b - a) <= 4e-16 * std::abs(a); },
        max_iter);
    const double x = 0.5 * (bracket.first + bracket.second);
    if (std::abs(g(x)) > 1e-10 && std::abs(bracket.second - bracket.first) > 1e-12 &&
        std::abs(bracket.second - bracket.first) > 4e-16 * std::abs(x)) {
        throw NumericalError("find_root: did not converge");
    }
    return x;
}

}  // namespace selent
