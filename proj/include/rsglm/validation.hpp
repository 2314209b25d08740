#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "rsglm/errors.hpp"
#include "rsglm/glm.hpp"
#include "rsglm/model.hpp"
#include "rsglm/random.hpp"

// Predictive-quality evaluation: leave-one-out (and k-fold) cross-validation,
// R^2, adjusted R^2.

namespace rsglm {

/// R^2 = 1 - SSE / SST.
inline double r_squared(const Eigen::VectorXd& observed, const Eigen::VectorXd& fitted) {
    if (observed.size() != fitted.size()) throw validation_error("r_squared: length mismatch");
    if (observed.size() < 2) throw validation_error("r_squared: need at least two observations");
    const double mean = observed.mean();
    const double sst = (observed.array() - mean).square().sum();
    if (sst == 0.0) throw validation_error("r_squared: observed values are constant");
    const double sse = (observed - fitted).squaredNorm();
    return 1.0 - sse / sst;
}

/// Adjusted R^2 = 1 - ((n-1)/(n-p)) (1 - R^2).
inline double adj_r_squared(double r2, int n, int p) {
    if (n <= p) throw validation_error("adj_r_squared requires n > p");
    return 1.0 - (static_cast<double>(n - 1) / static_cast<double>(n - p)) * (1.0 - r2);
}

struct ObsRecord {
    std::string run_id;
    std::string point_class; // parsed from run_id prefix, empty if absent
    double observed = 0.0;
    double fitted_in_sample = 0.0;
    double loocv_prediction = 0.0;
    bool fold_converged = true;
};

struct ValidationReport {
    double cv_n = 0.0; // mean squared held-out error over converged folds
    double r2 = 0.0;
    double adj_r2 = 0.0;
    int n_nonconverged_folds = 0;
    std::vector<ObsRecord> per_obs; // ordered by original index
};

namespace detail {

inline std::string point_class_of(const std::string& run_id) {
    for (const char* cls : {"center", "cube", "star"})
        if (run_id.rfind(cls, 0) == 0) return cls;
    return {};
}

inline Dataset rows_subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.factor_names = data.factor_names;
    out.coded.resize(static_cast<Eigen::Index>(rows.size()), data.k());
    out.run_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.coded.row(static_cast<Eigen::Index>(r)) = data.coded.row(rows[r]);
        out.run_ids.push_back(data.run_ids[static_cast<std::size_t>(rows[r])]);
    }
    for (const auto& [name, y] : data.responses) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            v(static_cast<Eigen::Index>(r)) = y(rows[r]);
        out.responses.emplace(name, std::move(v));
    }
    return out;
}

} // namespace detail

/// k-fold cross-validation; k = n is LOOCV. Fold assignment for k < n is a
/// seeded shuffle; for k = n each fold is its own observation and the seed is
/// unused. Fold datasets are constructed by exclusion before fitting, so a
/// fold never sees its held-out responses. Non-convergent folds are excluded
/// from cv_n and reported.
inline ValidationReport cross_validate(const Dataset& data, const std::string& response,
                                       const ModelSpec& spec, const FitOptions& opts,
                                       int k, std::uint64_t seed = 0) {
    data.validate();
    const Eigen::Index n = data.n();
    const auto p = static_cast<Eigen::Index>(spec.size());
    if (k < 2 || k > n) throw validation_error("k must be in [2, n]");
    if (n < p + 2) throw validation_error("cross-validation requires n >= p + 2");
    const Eigen::VectorXd& y = data.response(response);

    // In-sample fit for R^2 / adjusted R^2 and fitted values.
    const FitResult full_fit = fit_model(data, response, spec, opts);
    const Eigen::VectorXd fitted = predict(full_fit, full_fit.X);
    const double r2 = r_squared(y, fitted);

    // Fold assignment, by original index for k = n.
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    if (k == n) {
        std::iota(fold_of.begin(), fold_of.end(), 0);
    } else {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        Rng rng(seed);
        fisher_yates(order, rng);
        for (std::size_t i = 0; i < order.size(); ++i)
            fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
    }

    ValidationReport rep;
    rep.per_obs.resize(static_cast<std::size_t>(n));
    double sse_heldout = 0.0;
    Eigen::Index n_used = 0;

    for (int fold = 0; fold < k; ++fold) {
        std::vector<Eigen::Index> train, held;
        for (Eigen::Index i = 0; i < n; ++i)
            (fold_of[static_cast<std::size_t>(i)] == fold ? held : train).push_back(i);
        if (held.empty()) continue;
        if (static_cast<Eigen::Index>(train.size()) < p)
            throw numeric_error("fold " + std::to_string(fold) + " leaves fewer rows than terms");

        const Dataset train_data = detail::rows_subset(data, train);
        FitResult ffit;
        bool ok = true;
        try {
            ffit = fit_model(train_data, response, spec, opts);
            ok = ffit.converged;
        } catch (const numeric_error& e) {
            throw numeric_error("fold " + std::to_string(fold) + ": " + e.what());
        }

        const Dataset held_data = detail::rows_subset(data, held);
        Eigen::VectorXd yhat;
        if (ok) yhat = predict(ffit, build_design_matrix(held_data, spec));

        for (std::size_t h = 0; h < held.size(); ++h) {
            const auto i = static_cast<std::size_t>(held[h]);
            ObsRecord& rec = rep.per_obs[i];
            rec.run_id = data.run_ids[i];
            rec.point_class = detail::point_class_of(rec.run_id);
            rec.observed = y(held[h]);
            rec.fitted_in_sample = fitted(held[h]);
            rec.fold_converged = ok;
            if (ok) {
                rec.loocv_prediction = yhat(static_cast<Eigen::Index>(h));
                sse_heldout += (rec.observed - rec.loocv_prediction) *
                               (rec.observed - rec.loocv_prediction);
                ++n_used;
            } else {
                rec.loocv_prediction = std::numeric_limits<double>::quiet_NaN();
                ++rep.n_nonconverged_folds;
            }
        }
    }

    if (n_used == 0) throw numeric_error("no fold converged");
    rep.cv_n = sse_heldout / static_cast<double>(n_used);
    rep.r2 = r2;
    rep.adj_r2 = adj_r_squared(r2, static_cast<int>(n), static_cast<int>(p));
    return rep;
}

/// Leave-one-out cross-validation: n folds of one observation each.
inline ValidationReport loocv(const Dataset& data, const std::string& response,
                              const ModelSpec& spec, const FitOptions& opts = {}) {
    return cross_validate(data, response, spec, opts, static_cast<int>(data.n()));
}

} // namespace rsglm
