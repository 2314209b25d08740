#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rsglm/errors.hpp"
#include "rsglm/glm.hpp"
#include "rsglm/model.hpp"

// AIC and AIC-guided backward elimination with forced-in terms.

namespace rsglm {

/// AIC = -2 loglik + 2 (p + 1). The +1 counts the dispersion parameter; this
/// is the convention under which the published (loglik, AIC) pairs reconcile.
inline double aic(const FitResult& fit) {
    if (!fit.converged) throw numeric_error("AIC requires a converged fit");
    if (!std::isfinite(fit.loglik)) throw numeric_error("AIC requires a finite log-likelihood");
    return -2.0 * fit.loglik + 2.0 * static_cast<double>(fit.p + 1);
}

struct SelectionStep {
    ModelSpec spec;
    double aic = 0.0;
    std::optional<Term> removed; // term deleted to reach this step (none for step 0)
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    ModelSpec final_spec;
    std::set<Term> forced_retentions;
    std::vector<std::string> warnings; // skipped candidates etc.
};

namespace detail {

/// Under hierarchy, a main effect is frozen while its quadratic or any
/// interaction containing it is still in the model.
inline bool deletable_under_hierarchy(const ModelSpec& spec, const Term& t) {
    if (t.kind != Term::Kind::Main) return true;
    for (const auto& u : spec.terms) {
        if (u.kind == Term::Kind::Quadratic && u.a == t.a) return false;
        if (u.kind == Term::Kind::Interaction && u.involves(t.a)) return false;
    }
    return true;
}

inline Eigen::VectorXd restrict_beta(const ModelSpec& parent, const Eigen::VectorXd& beta,
                                     const ModelSpec& child) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(child.size()));
    for (std::size_t j = 0; j < child.terms.size(); ++j) {
        const auto& t = child.terms[j];
        for (std::size_t i = 0; i < parent.terms.size(); ++i) {
            if (parent.terms[i] == t) {
                out(static_cast<Eigen::Index>(j)) = beta(static_cast<Eigen::Index>(i));
                break;
            }
        }
    }
    return out;
}

} // namespace detail

/// Backward elimination: at each step evaluate the AIC of every single-term
/// deletion (skipping forced terms and, when hierarchy is on, mains whose
/// quadratic/interactions survive), remove the best deletion if it improves
/// the current AIC, stop otherwise. Candidates are scanned in spec order, and
/// strict comparison makes the first of any tied minima win.
inline SelectionTrace backward_eliminate(const Dataset& data, const std::string& response,
                                         const ModelSpec& full, const std::set<Term>& forced,
                                         bool hierarchy = true, const FitOptions& opts = {}) {
    full.validate();
    for (const auto& t : forced)
        if (!full.contains(t))
            throw validation_error("forced term '" + t.label() + "' is not in the full model");

    SelectionTrace trace;
    trace.forced_retentions = forced;
    trace.forced_retentions.insert(Term::intercept());

    ModelSpec current = full;
    FitResult current_fit = fit_model(data, response, current, opts);
    double current_aic = aic(current_fit);
    trace.steps.push_back({current, current_aic, std::nullopt});

    for (;;) {
        std::optional<Term> best_term;
        double best_aic = current_aic;
        FitResult best_fit;

        for (const auto& t : current.terms) {
            if (trace.forced_retentions.count(t)) continue;
            if (hierarchy && !detail::deletable_under_hierarchy(current, t)) continue;
            const ModelSpec candidate = current.without(t);
            try {
                FitOptions copts = opts;
                copts.init = detail::restrict_beta(current, current_fit.beta, candidate);
                FitResult f = fit_model(data, response, candidate, copts);
                const double a = aic(f);
                if (a < best_aic) {
                    best_aic = a;
                    best_term = t;
                    best_fit = std::move(f);
                }
            } catch (const std::exception& e) {
                trace.warnings.push_back("skipped candidate deletion of '" + t.label() +
                                         "': " + e.what());
            }
        }

        if (!best_term) break;
        current = current.without(*best_term);
        current_fit = std::move(best_fit);
        current_aic = best_aic;
        trace.steps.push_back({current, current_aic, best_term});
    }

    trace.final_spec = current;
    return trace;
}

} // namespace rsglm
