#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsglm/doe.hpp"
#include "rsglm/errors.hpp"
#include "rsglm/glm.hpp"
#include "rsglm/inference.hpp"
#include "rsglm/model.hpp"
#include "rsglm/selection.hpp"
#include "rsglm/validation.hpp"

// I/O layer: CSV ingestion/emission, the project config file, and the JSON /
// table report emitters behind the CLI. CSV dialect: comma-separated, header
// row mandatory, "." decimal separator, UTF-8.

namespace rsglm {

// ---------------------------------------------------------------------------
// number formatting

/// Shortest round-trip decimal representation (used in CSV data files).
inline std::string format_full(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Fixed 6-significant-digit formatting for human-readable tables.
inline std::string format_sig(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV primitives

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size())
                throw validation_error(path + ": row has " + std::to_string(cells.size()) +
                                       " cells, header has " + std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw validation_error(path + ": empty file (header row mandatory)");
    return t;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw validation_error("cannot parse number '" + s + "' in " + context);
    }
}

// ---------------------------------------------------------------------------
// project configuration

struct ProjectConfig {
    std::vector<Factor> factors;
    std::vector<std::string> responses;
    std::optional<std::vector<std::string>> explicit_model; // absent = full second order
    std::vector<std::string> forced_terms;
    FitOptions fit_options;
    bool hierarchy = true;
    std::size_t n_center = 1;
    AlphaChoice alpha = AlphaChoice::spherical();
    std::uint64_t seed = 0;

    std::vector<std::string> factor_names() const {
        std::vector<std::string> out;
        out.reserve(factors.size());
        for (const auto& f : factors) out.push_back(f.name);
        return out;
    }

    ModelSpec model_spec() const {
        if (!explicit_model) return full_second_order(factor_names());
        std::vector<Term> terms;
        terms.reserve(explicit_model->size());
        for (const auto& s : *explicit_model) terms.push_back(Term::parse(s));
        return ModelSpec(std::move(terms));
    }

    std::set<Term> forced_set() const {
        std::set<Term> out;
        out.insert(Term::intercept());
        for (const auto& s : forced_terms) out.insert(Term::parse(s));
        return out;
    }
};

inline ProjectConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error(std::string("config parse error: ") + e.what());
    }

    ProjectConfig cfg;
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty())
        throw validation_error("config must declare a non-empty 'factors' array");
    for (const auto& jf : j["factors"]) {
        Factor f;
        f.name = jf.at("name").get<std::string>();
        f.center = jf.at("center").get<double>();
        f.step = jf.at("step").get<double>();
        f.unit = jf.value("unit", "");
        f.validate();
        cfg.factors.push_back(std::move(f));
    }
    check_unique_names(cfg.factors);

    if (j.contains("responses"))
        cfg.responses = j["responses"].get<std::vector<std::string>>();

    if (j.contains("model")) {
        if (j["model"].is_string()) {
            const auto m = j["model"].get<std::string>();
            if (m != "full-second-order")
                throw validation_error("config model: expected \"full-second-order\" or a term list");
        } else {
            cfg.explicit_model = j["model"].get<std::vector<std::string>>();
        }
    }
    if (j.contains("forced_terms"))
        cfg.forced_terms = j["forced_terms"].get<std::vector<std::string>>();

    if (j.contains("fit")) {
        const auto& jf = j["fit"];
        if (jf.contains("algorithm")) {
            const auto a = jf["algorithm"].get<std::string>();
            if (a == "newton-raphson") cfg.fit_options.algorithm = Algorithm::NewtonRaphson;
            else if (a == "fisher-scoring") cfg.fit_options.algorithm = Algorithm::FisherScoring;
            else throw validation_error("config fit.algorithm: unknown '" + a + "'");
        }
        cfg.fit_options.max_iter = jf.value("max_iter", cfg.fit_options.max_iter);
        cfg.fit_options.tol = jf.value("tol", cfg.fit_options.tol);
        cfg.fit_options.validate();
    }
    if (j.contains("selection"))
        cfg.hierarchy = j["selection"].value("hierarchy", true);

    if (j.contains("design")) {
        const auto& jd = j["design"];
        cfg.n_center = jd.value("n_center", std::size_t{1});
        if (jd.contains("alpha")) {
            if (jd["alpha"].is_string()) {
                if (jd["alpha"].get<std::string>() != "spherical")
                    throw validation_error("config design.alpha: expected \"spherical\" or a number");
            } else {
                cfg.alpha = AlphaChoice::custom(jd["alpha"].get<double>());
            }
        }
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    return cfg;
}

// ---------------------------------------------------------------------------
// design emission

inline void write_design_csv(const Design& d, std::ostream& out) {
    out << "run_id,run_order,point_class";
    for (const auto& f : d.factors) out << "," << f.name;
    for (const auto& f : d.factors) out << "," << f.name << "_physical";
    out << "\n";
    for (std::size_t r = 0; r < d.size(); ++r) {
        const std::size_t idx = d.run_order[r];
        const auto& p = d.points[idx];
        out << design_run_id(d, idx) << "," << r << "," << to_string(p.point_class);
        for (Eigen::Index j = 0; j < p.coded.size(); ++j) out << "," << format_full(p.coded(j));
        for (Eigen::Index j = 0; j < p.coded.size(); ++j)
            out << "," << format_full(decode_value(d.factors[static_cast<std::size_t>(j)], p.coded(j)));
        out << "\n";
    }
}

inline nlohmann::json design_to_json(const Design& d) {
    nlohmann::json j;
    j["alpha"] = d.alpha;
    j["n_center"] = d.n_center;
    j["seed"] = d.seed;
    j["factors"] = nlohmann::json::array();
    for (const auto& f : d.factors)
        j["factors"].push_back({{"name", f.name}, {"center", f.center}, {"step", f.step}, {"unit", f.unit}});
    j["runs"] = nlohmann::json::array();
    for (std::size_t r = 0; r < d.size(); ++r) {
        const std::size_t idx = d.run_order[r];
        const auto& p = d.points[idx];
        nlohmann::json run;
        run["run_id"] = design_run_id(d, idx);
        run["run_order"] = r;
        run["point_class"] = to_string(p.point_class);
        run["coded"] = std::vector<double>(p.coded.data(), p.coded.data() + p.coded.size());
        std::vector<double> phys;
        for (Eigen::Index c = 0; c < p.coded.size(); ++c)
            phys.push_back(decode_value(d.factors[static_cast<std::size_t>(c)], p.coded(c)));
        run["physical"] = phys;
        j["runs"].push_back(std::move(run));
    }
    return j;
}

// ---------------------------------------------------------------------------
// dataset ingestion

/// Read a wide-format campaign CSV: factor columns (coded units) plus any of
/// the named response columns. A design CSV emitted by write_design_csv with
/// appended response columns parses unchanged.
inline Dataset read_dataset(const std::string& path, const std::vector<std::string>& factor_names,
                            const std::vector<std::string>& response_names) {
    const CsvTable t = read_csv(path);
    Dataset ds;
    ds.factor_names = factor_names;

    std::vector<std::size_t> fcols;
    for (const auto& name : factor_names) {
        auto c = t.column(name);
        if (!c) throw validation_error(path + ": missing factor column '" + name + "'");
        fcols.push_back(*c);
    }
    const auto id_col = t.column("run_id");

    const auto n = static_cast<Eigen::Index>(t.rows.size());
    if (n < 1) throw validation_error(path + ": no data rows");
    ds.coded.resize(n, static_cast<Eigen::Index>(fcols.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = t.rows[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < fcols.size(); ++j)
            ds.coded(i, static_cast<Eigen::Index>(j)) =
                parse_double(row[fcols[j]], path + " column " + factor_names[j]);
        if (id_col) {
            ds.run_ids.push_back(row[*id_col]);
        } else {
            std::string num = std::to_string(i);
            if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
            ds.run_ids.push_back("run-" + num);
        }
    }

    for (const auto& name : response_names) {
        auto c = t.column(name);
        if (!c) continue; // configured responses may be absent from a given file
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i)
            y(i) = parse_double(t.rows[static_cast<std::size_t>(i)][*c], path + " column " + name);
        ds.responses.emplace(name, std::move(y));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// fit / selection / validation reports

/// Coefficient table: term, estimate, (standard error), stars,
/// with AIC and log-likelihood footer.
inline void write_fit_table(const FitResult& fit, std::ostream& out) {
    const auto tests = t_tests(fit);
    std::size_t width = 16; // >= strlen("Log Likelihood") + 2
    for (const auto& t : tests) width = std::max(width, t.term.size() + 2);
    for (const auto& t : tests) {
        out << t.term;
        out << std::string(width - t.term.size(), ' ');
        out << format_sig(t.estimate) << " (" << format_sig(t.std_error) << ")";
        if (!t.stars.empty()) out << " " << t.stars;
        out << "\n";
    }
    out << std::string(width + 20, '-') << "\n";
    out << "AIC" << std::string(width - 3, ' ') << format_sig(aic(fit)) << "\n";
    out << "Log Likelihood" << std::string(width - 14, ' ') << format_sig(fit.loglik) << "\n";
}

inline nlohmann::json fit_to_json(const FitResult& fit) {
    nlohmann::json j;
    j["n"] = fit.n;
    j["p"] = fit.p;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["algorithm"] = to_string(fit.algorithm_used);
    j["nu_hat"] = fit.nu_hat;
    j["loglik"] = fit.loglik;
    if (fit.converged) j["aic"] = aic(fit);
    j["coefficients"] = nlohmann::json::array();
    if (fit.n > fit.p && fit.cov_beta.allFinite()) {
        for (const auto& t : t_tests(fit)) {
            j["coefficients"].push_back({{"term", t.term},
                                         {"estimate", t.estimate},
                                         {"std_error", t.std_error},
                                         {"t", t.statistic},
                                         {"p_value", t.p_value},
                                         {"stars", t.stars}});
        }
    } else {
        for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
            const std::string term = fit.spec.terms.empty()
                                         ? "b" + std::to_string(i)
                                         : fit.spec.terms[static_cast<std::size_t>(i)].label();
            j["coefficients"].push_back({{"term", term}, {"estimate", fit.beta(i)}});
        }
    }
    return j;
}

inline nlohmann::json trace_to_json(const SelectionTrace& trace) {
    nlohmann::json j;
    j["final_model"] = trace.final_spec.labels();
    nlohmann::json forced = nlohmann::json::array();
    for (const auto& t : trace.forced_retentions) forced.push_back(t.label());
    j["forced_retentions"] = forced;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json js;
        js["aic"] = s.aic;
        js["model"] = s.spec.labels();
        if (s.removed) js["removed"] = s.removed->label();
        j["steps"].push_back(std::move(js));
    }
    j["warnings"] = trace.warnings;
    return j;
}

inline nlohmann::json validation_to_json(const ValidationReport& rep) {
    nlohmann::json j;
    j["cv_n"] = rep.cv_n;
    j["r2"] = rep.r2;
    j["adj_r2"] = rep.adj_r2;
    j["nonconverged_folds"] = rep.n_nonconverged_folds;
    j["per_obs"] = nlohmann::json::array();
    for (const auto& o : rep.per_obs) {
        j["per_obs"].push_back({{"run_id", o.run_id},
                                {"point_class", o.point_class},
                                {"observed", o.observed},
                                {"fitted_in_sample", o.fitted_in_sample},
                                {"loocv_prediction", o.loocv_prediction},
                                {"fold_converged", o.fold_converged}});
    }
    return j;
}

/// Observed-vs-predicted export behind the scatter plots.
inline void write_per_obs_csv(const ValidationReport& rep, std::ostream& out) {
    out << "run_id,point_class,observed,loocv_prediction\n";
    for (const auto& o : rep.per_obs)
        out << o.run_id << "," << o.point_class << "," << format_full(o.observed) << ","
            << format_full(o.loocv_prediction) << "\n";
}

} // namespace rsglm
