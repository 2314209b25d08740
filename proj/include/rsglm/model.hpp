#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rsglm/errors.hpp"

// Core data model: factors with a coded <-> physical transform, the term
// algebra for second-order response-surface models, and expansion of a model
// specification into a numeric design matrix. Coded units are the canonical
// internal representation; physical values appear only at I/O boundaries.

namespace rsglm {

/// A physical process variable. `center` is the physical level coded as 0,
/// `step` the physical distance to the +/-1 levels.
struct Factor {
    std::string name;
    double center = 0.0;
    double step = 1.0;
    std::string unit;

    void validate() const {
        if (name.empty()) throw validation_error("factor has empty name");
        if (!(step > 0.0))
            throw validation_error("factor '" + name + "': step must be > 0");
    }
};

/// Coded value of a physical level: (physical - center) / step.
inline double code_value(const Factor& f, double physical) {
    f.validate();
    return (physical - f.center) / f.step;
}

/// Physical level of a coded value: center + coded * step. Exact inverse of
/// code_value.
inline double decode_value(const Factor& f, double coded) {
    f.validate();
    return f.center + coded * f.step;
}

inline void check_unique_names(const std::vector<Factor>& factors) {
    std::set<std::string> seen;
    for (const auto& f : factors) {
        f.validate();
        if (!seen.insert(f.name).second)
            throw validation_error("duplicate factor name '" + f.name + "'");
    }
}

/// One column of the model: intercept, main effect, quadratic effect, or a
/// pairwise interaction. Interactions are order-normalized (a < b by name) so
/// duplicates are detectable.
struct Term {
    enum class Kind { Intercept, Main, Quadratic, Interaction };

    Kind kind = Kind::Intercept;
    std::string a; // factor name (Main, Quadratic, Interaction)
    std::string b; // second factor name (Interaction only)

    static Term intercept() { return Term{Kind::Intercept, "", ""}; }
    static Term main(std::string f) { return Term{Kind::Main, std::move(f), ""}; }
    static Term quadratic(std::string f) { return Term{Kind::Quadratic, std::move(f), ""}; }
    static Term interaction(std::string fa, std::string fb) {
        if (fa == fb)
            throw validation_error("interaction requires two distinct factors, got '" + fa + "' twice");
        if (fb < fa) std::swap(fa, fb);
        return Term{Kind::Interaction, std::move(fa), std::move(fb)};
    }

    bool involves(const std::string& factor) const {
        return a == factor || b == factor;
    }

    std::string label() const {
        switch (kind) {
            case Kind::Intercept: return "Intercept";
            case Kind::Main: return a;
            case Kind::Quadratic: return a + "^2";
            case Kind::Interaction: return a + ":" + b;
        }
        return {};
    }

    /// Inverse of label(): "Intercept" (or "1"), "PFR", "PFR^2", "PFR:SOD".
    static Term parse(const std::string& s) {
        if (s == "Intercept" || s == "1") return intercept();
        if (auto pos = s.find(':'); pos != std::string::npos)
            return interaction(s.substr(0, pos), s.substr(pos + 1));
        if (s.size() > 2 && s.substr(s.size() - 2) == "^2")
            return quadratic(s.substr(0, s.size() - 2));
        if (s.empty()) throw validation_error("empty term");
        return main(s);
    }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term& lhs, const Term& rhs) {
        return std::tie(lhs.kind, lhs.a, lhs.b) <=> std::tie(rhs.kind, rhs.a, rhs.b);
    }
};

/// An ordered, duplicate-free set of terms. Every model contains the
/// intercept.
struct ModelSpec {
    std::vector<Term> terms;

    ModelSpec() = default;
    explicit ModelSpec(std::vector<Term> t) : terms(std::move(t)) { validate(); }

    void validate() const {
        std::set<Term> seen;
        bool has_intercept = false;
        for (const auto& t : terms) {
            if (!seen.insert(t).second)
                throw validation_error("duplicate term '" + t.label() + "' in model spec");
            if (t.kind == Term::Kind::Intercept) has_intercept = true;
        }
        if (!has_intercept)
            throw validation_error("model spec must contain the intercept");
    }

    std::size_t size() const { return terms.size(); }

    bool contains(const Term& t) const {
        return std::find(terms.begin(), terms.end(), t) != terms.end();
    }

    /// New spec with `t` removed, original order preserved.
    ModelSpec without(const Term& t) const {
        std::vector<Term> kept;
        kept.reserve(terms.size());
        for (const auto& u : terms)
            if (!(u == t)) kept.push_back(u);
        return ModelSpec(std::move(kept));
    }

    bool nested_in(const ModelSpec& super) const {
        return std::all_of(terms.begin(), terms.end(),
                           [&](const Term& t) { return super.contains(t); });
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(terms.size());
        for (const auto& t : terms) out.push_back(t.label());
        return out;
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Canonical full second-order spec: Intercept, mains in factor order,
/// quadratics in factor order, interactions as lexicographic-by-position
/// pairs. For k factors this has 1 + 2k + k(k-1)/2 terms.
inline ModelSpec full_second_order(const std::vector<std::string>& factor_names) {
    std::vector<Term> terms;
    terms.push_back(Term::intercept());
    for (const auto& f : factor_names) terms.push_back(Term::main(f));
    for (const auto& f : factor_names) terms.push_back(Term::quadratic(f));
    for (std::size_t i = 0; i < factor_names.size(); ++i)
        for (std::size_t j = i + 1; j < factor_names.size(); ++j)
            terms.push_back(Term::interaction(factor_names[i], factor_names[j]));
    return ModelSpec(std::move(terms));
}

/// Experimental data in coded units plus named response vectors. Immutable by
/// convention after construction.
struct Dataset {
    std::vector<std::string> factor_names;
    Eigen::MatrixXd coded; // n x k
    std::map<std::string, Eigen::VectorXd> responses;
    std::vector<std::string> run_ids;

    Eigen::Index n() const { return coded.rows(); }
    Eigen::Index k() const { return coded.cols(); }

    void validate() const {
        if (coded.rows() < 1) throw validation_error("dataset must contain at least one run");
        if (static_cast<std::size_t>(coded.cols()) != factor_names.size())
            throw validation_error("dataset column count does not match factor names");
        if (run_ids.size() != static_cast<std::size_t>(coded.rows()))
            throw validation_error("dataset run_ids length does not match row count");
        for (const auto& [name, y] : responses) {
            if (y.size() != coded.rows())
                throw validation_error("response '" + name + "' has wrong length");
            if ((y.array() <= 0.0).any())
                throw validation_error("response '" + name +
                                       "' contains non-positive values (outside gamma support)");
        }
    }

    int factor_index(const std::string& name) const {
        for (std::size_t i = 0; i < factor_names.size(); ++i)
            if (factor_names[i] == name) return static_cast<int>(i);
        throw validation_error("unknown factor '" + name + "' (dataset has: " + joined_names() + ")");
    }

    const Eigen::VectorXd& response(const std::string& name) const {
        auto it = responses.find(name);
        if (it == responses.end())
            throw validation_error("unknown response '" + name + "'");
        return it->second;
    }

private:
    std::string joined_names() const {
        std::string s;
        for (const auto& f : factor_names) {
            if (!s.empty()) s += ", ";
            s += f;
        }
        return s;
    }
};

/// Expand a model spec over a dataset into the n x p design matrix. Column j
/// evaluates terms[j] on the coded factor values; column order follows the
/// spec.
inline Eigen::MatrixXd build_design_matrix(const Dataset& data, const ModelSpec& spec) {
    spec.validate();
    const Eigen::Index n = data.n();
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(spec.size()));
    for (std::size_t j = 0; j < spec.terms.size(); ++j) {
        const Term& t = spec.terms[j];
        const auto col = static_cast<Eigen::Index>(j);
        switch (t.kind) {
            case Term::Kind::Intercept:
                X.col(col).setOnes();
                break;
            case Term::Kind::Main:
                X.col(col) = data.coded.col(data.factor_index(t.a));
                break;
            case Term::Kind::Quadratic:
                X.col(col) = data.coded.col(data.factor_index(t.a)).array().square();
                break;
            case Term::Kind::Interaction:
                X.col(col) = data.coded.col(data.factor_index(t.a)).array() *
                             data.coded.col(data.factor_index(t.b)).array();
                break;
        }
    }
    return X;
}

} // namespace rsglm
