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

// Command-line front end. run() never calls exit(); it returns
//   0 success, 1 usage or invalid argument, 2 data/parse/I-O error,
//   3 numerical failure.

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "selent/analysis.hpp"
#include "selent/constants.hpp"
#include "selent/errors.hpp"
#include "selent/estimators.hpp"
#include "selent/montecarlo.hpp"
#include "selent/svg.hpp"

namespace selent::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// SELENT_QUAD_TOL sets both tolerances of the constants quadrature.
inline constexpr const char* kQuadTolEnv = "SELENT_QUAD_TOL";

inline QuadratureConfig quadrature_from_env() {
    QuadratureConfig cfg = kConstantsQuadrature;
    if (const char* s = std::getenv(kQuadTolEnv); s != nullptr && *s != '\0') {
        double tol = 0.0;
        const char* end = s + std::char_traits<char>::length(s);
        const auto res = std::from_chars(s, end, tol);
        if (res.ec != std::errc{} || res.ptr != end || !(tol > 0.0)) {
            throw ConfigError(std::string(kQuadTolEnv) + " must be a positive number, got '" + s + "'");
        }
        cfg.abs_tol = tol;
        cfg.rel_tol = tol;
    }
    cfg.validate();
    return cfg;
}

namespace detail {

inline double parse_number(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(what + ": not a number: '" + s + "'");
    }
    return v;
}

/// Named constant or literal: ln_alpha, ln_alpha_plus_1, psi_alpha, c2, c3, <number>.
inline double resolve_constant(const std::string& s, Shape alpha, const QuadratureConfig& q) {
    const double a = alpha.value();
    if (s == "ln_alpha") return std::log(a);
    if (s == "ln_alpha_plus_1") return std::log1p(a);
    if (s == "psi_alpha") return digamma(a);
    if (s == "c2") return c2(alpha, q);
    if (s == "c3") return c3(alpha, q);
    return parse_number(s, "estimator constant");
}

/// KIND:VALUE with KIND in {naive, genbayes, shrink}. For genbayes VALUE is
/// the prior exponent β.
inline EstimatorId parse_estimator(const std::string& text, Target target, Shape alpha, const QuadratureConfig& q) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("estimator '" + text + "' must look like KIND:VALUE");
    const std::string kind = text.substr(0, colon);
    const std::string value = text.substr(colon + 1);
    const bool worse = target == Target::worse;
    if (kind == "naive") {
        const double c = resolve_constant(value, alpha, q);
        return worse ? EstimatorId{NaiveWorse{c}} : EstimatorId{NaiveBetter{c}};
    }
    if (kind == "genbayes") {
        const double beta = parse_number(value, "prior exponent");
        if (!(alpha.value() + beta > 0.0)) throw ConfigError("genbayes prior exponent must exceed -alpha");
        return worse ? EstimatorId{GenBayesWorse{beta}} : EstimatorId{GenBayesBetter{beta}};
    }
    if (kind == "shrink") {
        const double c = resolve_constant(value, alpha, q);
        return worse ? EstimatorId{ShrinkWorse{c}} : EstimatorId{ShrinkBetter{c}};
    }
    throw ConfigError("unknown estimator kind '" + kind + "' (expected naive, genbayes or shrink)");
}

inline const std::vector<std::string>& default_estimator_specs() {
    static const std::vector<std::string> specs = {"naive:ln_alpha", "naive:ln_alpha_plus_1", "genbayes:0",
                                                   "shrink:ln_alpha", "shrink:ln_alpha_plus_1"};
    return specs;
}

inline Target parse_target(const std::string& s) {
    if (s == "worse") return Target::worse;
    if (s == "better") return Target::better;
    throw ConfigError("target must be 'worse' or 'better', got '" + s + "'");
}

/// The grid is given as scale ratios μ ≥ 1; the better target uses θ = 1/μ.
inline std::vector<double> grid_for(const std::vector<double>& mus, Target target) {
    std::vector<double> out;
    for (double mu : mus) {
        if (!(mu >= 1.0) || !std::isfinite(mu)) throw ConfigError("grid values must be finite and >= 1");
        out.push_back(target == Target::worse ? mu : 1.0 / mu);
    }
    return out;
}

inline std::string fixed3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

inline void write_table_text(std::ostream& os, const std::vector<ConstantsRow>& rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%8s %9s %9s %9s %11s %9s %14s\n", "alpha", "c1", "c2", "ln(a)", "ln(a+1)",
                  "beta0", "psi(2a)-ln2");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%8s %9s %9s %9s %11s %9s %14s\n", format_double(r.alpha).c_str(),
                      fixed3(r.c1).c_str(), fixed3(r.c2).c_str(), fixed3(r.ln_alpha).c_str(),
                      fixed3(r.ln_alpha_plus_1).c_str(), fixed3(r.beta0).c_str(), fixed3(r.psi2a_minus_ln2).c_str());
        os << line;
    }
}

/// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else if (ch != '\r') {
            fields.back() += ch;
        }
    }
    return fields;
}

/// One series per (estimator label, column), x from the mu column.
inline std::vector<svg::Series> read_plot_series(std::istream& in, const std::vector<std::string>& columns) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("plot input is empty");
    const auto header = split_csv_record(line);
    auto col_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("plot input has no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t xi = col_index("mu");
    const std::size_t li = col_index("estimator_label");
    std::vector<std::size_t> yi;
    for (const auto& c : columns) yi.push_back(col_index(c));

    std::vector<svg::Series> series;
    std::map<std::string, std::size_t> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_record(line);
        if (f.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields", line_no, 1, f.size());
        }
        auto value = [&](std::size_t i) {
            double v = 0.0;
            const auto res = std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
            if (res.ec != std::errc{} || res.ptr != f[i].data() + f[i].size()) {
                throw ParseError("not a number: '" + f[i] + "'", line_no, 1, i + 1);
            }
            return v;
        };
        const double x = value(xi);
        for (std::size_t k = 0; k < columns.size(); ++k) {
            const std::string name = columns.size() == 1 ? f[li] : f[li] + " " + columns[k];
            auto [it, inserted] = index.try_emplace(name, series.size());
            if (inserted) series.push_back({name, {}, {}});
            series[it->second].x.push_back(x);
            series[it->second].y.push_back(value(yi[k]));
        }
    }
    return series;
}

/// Writes to `path`, or to `fallback` when path is empty or "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw DataError("cannot open '" + path + "' for writing");
    fn(file);
    file.flush();
    if (!file) throw DataError("failed writing '" + path + "'");
}

inline SampleSet load_file(const std::string& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string label = path;
    if (const auto slash = label.find_last_of('/'); slash != std::string::npos) label = label.substr(slash + 1);
    return load_samples(in, format, label);
}

struct SimArgs {
    double alpha = 1.0;
    std::string target = "worse";
    std::vector<double> grid;
    long long reps = static_cast<long long>(kDefaultReps);
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    std::string out;
};

inline void add_sim_options(CLI::App* sub, SimArgs& a) {
    sub->add_option("--alpha", a.alpha, "Common shape of the two totals")->required();
    sub->add_option("--target", a.target, "worse or better")->capture_default_str();
    sub->add_option("--grid", a.grid, "Scale ratios mu >= 1 (default 1,1.25,...,10)")->delimiter(',');
    sub->add_option("--reps", a.reps, "Replications per grid point")->capture_default_str();
    sub->add_option("--seed", a.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", a.threads, "Worker threads, 0 = all cores (output does not depend on it)")
        ->capture_default_str();
    sub->add_option("--out", a.out, "Output CSV path (default stdout)");
}

inline SimConfig make_sim_config(const SimArgs& a) {
    if (a.reps < 1) throw ConfigError("--reps must be at least 1");
    SimConfig cfg;
    cfg.alpha = Shape(a.alpha);
    cfg.target = parse_target(a.target);
    cfg.grid = grid_for(a.grid.empty() ? default_mu_grid() : a.grid, cfg.target);
    cfg.reps = static_cast<std::size_t>(a.reps);
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    return cfg;
}

}  // namespace detail

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Estimation of the selected entropy of two gamma populations", "selent"};
    app.require_subcommand(1);

    std::vector<double> table_alphas;
    bool table_csv = false;
    auto* table = app.add_subcommand("table", "Constants table for a list of shapes");
    table->add_option("--alpha", table_alphas, "Shapes (default: the standard list)")->delimiter(',');
    table->add_flag("--csv", table_csv, "Full-precision CSV instead of the 3-decimal table");

    double const_alpha = 1.0;
    bool const_csv = false;
    auto* constants = app.add_subcommand("constants", "All constants for one shape");
    constants->add_option("--alpha", const_alpha, "Shape")->required();
    constants->add_flag("--csv", const_csv, "CSV output");

    detail::SimArgs sim;
    std::vector<std::string> sim_estimators;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo risk and bias on a grid");
    detail::add_sim_options(simulate, sim);
    simulate->add_option("--estimator", sim_estimators,
                         "KIND:VALUE, KIND in {naive, genbayes, shrink}; VALUE a number or ln_alpha, "
                         "ln_alpha_plus_1, psi_alpha, c2, c3 (repeatable)");

    detail::SimArgs dom;
    std::string dom_a = "shrink:ln_alpha";
    std::string dom_b = "naive:ln_alpha";
    auto* dominance = app.add_subcommand("dominance", "Paired risk comparison of two estimators");
    detail::add_sim_options(dominance, dom);
    dominance->add_option("--a", dom_a, "Candidate dominating estimator")->capture_default_str();
    dominance->add_option("--b", dom_b, "Estimator it should dominate")->capture_default_str();

    std::string file_a, file_b, format_name = "whitespace";
    double shape = 1.0;
    bool an_csv = false, full_entropy = false, no_alt = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "Estimates from two samples of failure times");
    analyze_cmd->add_option("--a", file_a, "Sample of population 1")->required();
    analyze_cmd->add_option("--b", file_b, "Sample of population 2")->required();
    analyze_cmd->add_option("--shape", shape, "Known shape of each observation")->required();
    analyze_cmd->add_option("--format", format_name, "whitespace or csv")->capture_default_str();
    analyze_cmd->add_flag("--csv", an_csv, "CSV output");
    analyze_cmd->add_flag("--full-entropy", full_entropy, "Add the known constant to report full entropies");
    analyze_cmd->add_flag("--no-alt-lambda", no_alt, "Omit the alternate-lambda shrinkage rows");

    std::string plot_in, plot_out, plot_title;
    std::vector<std::string> plot_columns{"mse"};
    auto* plot = app.add_subcommand("plot", "SVG line chart of a simulate CSV");
    plot->add_option("--in", plot_in, "CSV written by simulate")->required();
    plot->add_option("--out", plot_out, "SVG path (default stdout)");
    plot->add_option("--y", plot_columns, "Columns to plot against mu")->delimiter(',')->capture_default_str();
    plot->add_option("--title", plot_title, "Chart title");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const QuadratureConfig quad = quadrature_from_env();
        if (table->parsed()) {
            auto rows = generate_table(table_alphas.empty() ? default_table_alphas() : table_alphas, quad);
            if (table_csv) write_constants_csv(out, rows);
            else detail::write_table_text(out, rows);
        } else if (constants->parsed()) {
            const auto row = constants_row(Shape(const_alpha), quad);
            if (const_csv) {
                write_constants_csv(out, {row});
            } else {
                out << "alpha             " << format_double(row.alpha) << '\n'
                    << "c1                " << format_double(row.c1) << '\n'
                    << "c2                " << format_double(row.c2) << '\n'
                    << "c3                " << format_double(row.c3) << '\n'
                    << "ln(alpha)         " << format_double(row.ln_alpha) << '\n'
                    << "ln(alpha+1)       " << format_double(row.ln_alpha_plus_1) << '\n'
                    << "beta0             " << format_double(row.beta0) << '\n'
                    << "beta1             " << format_double(row.beta1) << '\n'
                    << "psi(2alpha)-ln2   " << format_double(row.psi2a_minus_ln2) << '\n';
            }
        } else if (simulate->parsed()) {
            SimConfig cfg = detail::make_sim_config(sim);
            for (const auto& s : sim_estimators.empty() ? detail::default_estimator_specs() : sim_estimators) {
                cfg.estimators.push_back(detail::parse_estimator(s, cfg.target, cfg.alpha, quad));
            }
            const auto points = simulate_risk(cfg);
            detail::with_output(sim.out, out, [&](std::ostream& os) { write_risk_csv(os, cfg, points); });
        } else if (dominance->parsed()) {
            SimConfig cfg = detail::make_sim_config(dom);
            const auto a = detail::parse_estimator(dom_a, cfg.target, cfg.alpha, quad);
            const auto b = detail::parse_estimator(dom_b, cfg.target, cfg.alpha, quad);
            const auto report = dominance_report(cfg, a, b);
            detail::with_output(dom.out, out, [&](std::ostream& os) { write_dominance_csv(os, cfg, report); });
            std::size_t flagged = 0;
            for (const auto& p : report.points) flagged += p.flagged ? 1 : 0;
            err << report.label_a << " vs " << report.label_b << ": " << flagged << " of " << report.points.size()
                << " grid points flagged\n";
        } else if (analyze_cmd->parsed()) {
            Format format;
            if (format_name == "whitespace") format = Format::whitespace;
            else if (format_name == "csv") format = Format::csv;
            else throw ConfigError("--format must be 'whitespace' or 'csv'");
            const Shape per_obs(shape);
            const auto a = detail::load_file(file_a, format);
            const auto b = detail::load_file(file_b, format);
            const auto report = analyze(a, b, per_obs.value(), AnalysisOptions{!no_alt, full_entropy});
            if (an_csv) write_report_csv(out, report);
            else write_report_text(out, report);
        } else if (plot->parsed()) {
            std::ifstream in(plot_in, std::ios::binary);
            if (!in) throw DataError("cannot open '" + plot_in + "'");
            const auto series = detail::read_plot_series(in, plot_columns);
            std::string y_label;
            for (const auto& c : plot_columns) y_label += (y_label.empty() ? "" : ", ") + c;
            svg::ChartOptions opt{plot_title, "mu", y_label};
            detail::with_output(plot_out, out, [&](std::ostream& os) { svg::write_line_chart(os, series, opt); });
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const BracketError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kData;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}

}  // namespace selent::cli
