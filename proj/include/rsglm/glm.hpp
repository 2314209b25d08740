#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsglm/errors.hpp"
#include "rsglm/model.hpp"

// Gamma GLM with logarithmic link: log-likelihood, analytic score and
// information matrices, Newton-Raphson / Fisher-scoring ML solvers, Pearson
// dispersion estimation, and prediction. The score root does not depend on
// the scale parameter nu, so iteration runs at nu = 1 and nu is estimated
// afterwards.

namespace rsglm {

enum class Algorithm { NewtonRaphson, FisherScoring };

inline std::string to_string(Algorithm a) {
    return a == Algorithm::NewtonRaphson ? "newton-raphson" : "fisher-scoring";
}

struct FitOptions {
    Algorithm algorithm = Algorithm::FisherScoring;
    int max_iter = 50;
    double tol = 1e-8; // max-abs coefficient change between iterations
    std::optional<Eigen::VectorXd> init; // default: least squares of log(y) on X
    double iteration_nu = 1.0; // scale used during iteration; does not move the optimum

    void validate() const {
        if (max_iter < 1) throw validation_error("max_iter must be >= 1");
        if (!(tol > 0.0)) throw validation_error("tol must be > 0");
        if (!(iteration_nu > 0.0)) throw validation_error("iteration_nu must be > 0");
    }
};

struct FitResult {
    ModelSpec spec; // empty terms when fit from a raw matrix
    Eigen::VectorXd beta;
    double nu_hat = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd cov_beta; // inverse expected information at (beta, nu_hat)
    double loglik = std::numeric_limits<double>::quiet_NaN();
    int n = 0;
    int p = 0;
    int iterations = 0;
    bool converged = false;
    Algorithm algorithm_used = Algorithm::FisherScoring;
    bool used_pseudo_inverse = false;
    bool dispersion_identifiable = true; // false on an exact fit (Pearson = 0)
    Eigen::MatrixXd X; // kept for downstream tests (LRT, selection, validation)
    Eigen::VectorXd y;

    Eigen::VectorXd standard_errors() const {
        return cov_beta.diagonal().array().sqrt();
    }
};

namespace detail {

inline void check_glm_inputs(const Eigen::VectorXd& beta, double nu,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (!(nu > 0.0)) throw validation_error("nu must be > 0");
    if (beta.size() != X.cols()) throw validation_error("beta length does not match design matrix columns");
    if (y.size() != X.rows()) throw validation_error("response length does not match design matrix rows");
    if ((y.array() <= 0.0).any())
        throw validation_error("response contains non-positive values (outside gamma support)");
}

inline Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = X * beta;
    if (!eta.allFinite()) throw numeric_error("non-finite linear predictor");
    return eta;
}

} // namespace detail

/// Gamma log-likelihood under the log link:
/// sum_i [ nu log nu - nu eta_i - lgamma(nu) + (nu-1) log y_i - nu y_i exp(-eta_i) ].
inline double log_likelihood(const Eigen::VectorXd& beta, double nu,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    detail::check_glm_inputs(beta, nu, X, y);
    const Eigen::VectorXd eta = detail::linear_predictor(X, beta);
    const auto n = static_cast<double>(y.size());
    double ll = n * (nu * std::log(nu) - std::lgamma(nu));
    ll += (-nu * eta.array() + (nu - 1.0) * y.array().log() -
           nu * y.array() * (-eta.array()).exp())
              .sum();
    return ll;
}

/// Score s(beta) = X^T nu (y / mu - 1), mu_i = exp(x_i^T beta).
inline Eigen::VectorXd score(const Eigen::VectorXd& beta, double nu,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    detail::check_glm_inputs(beta, nu, X, y);
    const Eigen::VectorXd eta = detail::linear_predictor(X, beta);
    const Eigen::ArrayXd ratio = y.array() * (-eta.array()).exp();
    return X.transpose() * (nu * (ratio - 1.0)).matrix();
}

/// Observed information H = X^T diag(nu y_i / mu_i) X.
inline Eigen::MatrixXd observed_information(const Eigen::VectorXd& beta, double nu,
                                            const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    detail::check_glm_inputs(beta, nu, X, y);
    const Eigen::VectorXd eta = detail::linear_predictor(X, beta);
    const Eigen::ArrayXd w = nu * y.array() * (-eta.array()).exp();
    return X.transpose() * w.matrix().asDiagonal() * X;
}

/// Expected information F = nu X^T X. Independent of beta and y under the log
/// link.
inline Eigen::MatrixXd expected_information(double nu, const Eigen::MatrixXd& X) {
    if (!(nu > 0.0)) throw validation_error("nu must be > 0");
    return nu * (X.transpose() * X);
}

/// Column indices that a rank-revealing QR flags as linearly dependent.
inline std::vector<Eigen::Index> dependent_columns(const Eigen::MatrixXd& X) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    std::vector<Eigen::Index> dep;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = rank; i < X.cols(); ++i) dep.push_back(perm(i));
    return dep;
}

/// Pearson dispersion: phi = (1/(n-p)) sum ((y_i - mu_i)/mu_i)^2, nu = 1/phi.
inline double estimate_dispersion(const Eigen::VectorXd& beta_hat,
                                  const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw validation_error("dispersion estimation requires n > p");
    detail::check_glm_inputs(beta_hat, 1.0, X, y);
    const Eigen::VectorXd eta = detail::linear_predictor(X, beta_hat);
    const Eigen::ArrayXd mu = eta.array().exp();
    const double pearson = ((y.array() - mu) / mu).square().sum();
    const double phi = pearson / static_cast<double>(n - p);
    if (!(phi > 0.0))
        throw numeric_error("zero Pearson statistic (exact fit): nu is unidentifiable");
    return 1.0 / phi;
}

/// Mean predictions exp(X_new beta), strictly positive.
inline Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != fit.beta.size())
        throw validation_error("prediction matrix has wrong column count");
    return (X_new * fit.beta).array().exp();
}

/// Maximum-likelihood fit. Iterates at opts.iteration_nu (default 1) with
/// step halving when a step would decrease the log-likelihood; nu_hat, loglik
/// and cov_beta are filled in afterwards at the Pearson dispersion estimate.
inline FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitOptions& opts = {}) {
    opts.validate();
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n < 1 || p < 1) throw validation_error("empty design matrix");
    if (y.size() != n) throw validation_error("response length does not match design matrix rows");
    if ((y.array() <= 0.0).any())
        throw validation_error("response contains non-positive values (outside gamma support)");

    if (auto dep = dependent_columns(X); !dep.empty()) {
        std::string msg = "design matrix is rank deficient; dependent column(s):";
        for (auto c : dep) msg += " " + std::to_string(c);
        throw numeric_error(msg);
    }

    const double nu_it = opts.iteration_nu;
    Eigen::VectorXd beta;
    if (opts.init) {
        if (opts.init->size() != p) throw validation_error("explicit init has wrong length");
        beta = *opts.init;
    } else {
        beta = X.colPivHouseholderQr().solve(y.array().log().matrix());
    }

    FitResult res;
    res.algorithm_used = opts.algorithm;
    res.n = static_cast<int>(n);
    res.p = static_cast<int>(p);

    // Fisher matrix is iteration-constant; factor it once.
    Eigen::MatrixXd fisher;
    Eigen::LLT<Eigen::MatrixXd> fisher_llt;
    if (opts.algorithm == Algorithm::FisherScoring) {
        fisher = expected_information(nu_it, X);
        fisher_llt.compute(fisher);
    }

    double ll = log_likelihood(beta, nu_it, X, y);
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const Eigen::VectorXd s = score(beta, nu_it, X, y);
        Eigen::VectorXd step;
        if (opts.algorithm == Algorithm::NewtonRaphson) {
            const Eigen::MatrixXd H = observed_information(beta, nu_it, X, y);
            Eigen::LLT<Eigen::MatrixXd> llt(H);
            if (llt.info() == Eigen::Success) {
                step = llt.solve(s);
            } else {
                // Documented fallback: pseudo-inverse when the factorization fails.
                res.used_pseudo_inverse = true;
                step = H.completeOrthogonalDecomposition().solve(s);
            }
        } else {
            if (fisher_llt.info() == Eigen::Success) {
                step = fisher_llt.solve(s);
            } else {
                res.used_pseudo_inverse = true;
                step = fisher.completeOrthogonalDecomposition().solve(s);
            }
        }

        // Step halving, at most 10 times, if the proposed step loses likelihood.
        double scale = 1.0;
        Eigen::VectorXd candidate = beta + step;
        double ll_new = log_likelihood(candidate, nu_it, X, y);
        for (int h = 0; h < 10 && !(ll_new >= ll - 1e-12 * std::abs(ll)); ++h) {
            scale *= 0.5;
            candidate = beta + scale * step;
            ll_new = log_likelihood(candidate, nu_it, X, y);
        }

        const double delta = (candidate - beta).cwiseAbs().maxCoeff();
        beta = candidate;
        ll = ll_new;
        if (delta < opts.tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    if (converged) {
        // Postcondition: the score is numerically zero at the accepted beta,
        // relative to the natural magnitude of its summands.
        const double scale = nu_it * (1.0 + (X.transpose() * y).cwiseAbs().maxCoeff());
        const double snorm = score(beta, nu_it, X, y).lpNorm<Eigen::Infinity>();
        if (!(snorm < opts.tol * scale)) converged = false;
    }

    res.beta = beta;
    res.iterations = iter;
    res.converged = converged;

    // Post-hoc dispersion, covariance, and log-likelihood at (beta, nu_hat).
    res.cov_beta = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    if (n > p) {
        try {
            res.nu_hat = estimate_dispersion(beta, X, y);
        } catch (const numeric_error&) {
            res.dispersion_identifiable = false;
        }
    } else {
        res.dispersion_identifiable = false;
    }
    if (res.dispersion_identifiable) {
        const Eigen::MatrixXd F = expected_information(res.nu_hat, X);
        Eigen::LLT<Eigen::MatrixXd> llt(F);
        if (llt.info() == Eigen::Success) {
            res.cov_beta = llt.solve(Eigen::MatrixXd::Identity(p, p));
        } else {
            res.used_pseudo_inverse = true;
            res.cov_beta = F.completeOrthogonalDecomposition().pseudoInverse();
        }
        res.loglik = log_likelihood(beta, res.nu_hat, X, y);
    }

    res.X = X;
    res.y = y;
    return res;
}

/// Fit a named response of a dataset under a model spec. Rank-deficiency
/// errors are re-raised with term names instead of column indices.
inline FitResult fit_model(const Dataset& data, const std::string& response,
                           const ModelSpec& spec, const FitOptions& opts = {}) {
    data.validate();
    const Eigen::MatrixXd X = build_design_matrix(data, spec);
    const Eigen::VectorXd& y = data.response(response);
    if (auto dep = dependent_columns(X); !dep.empty()) {
        std::string msg = "design matrix is rank deficient; dependent term(s):";
        for (auto c : dep) msg += " " + spec.terms[static_cast<std::size_t>(c)].label();
        throw numeric_error(msg);
    }
    FitResult res = fit(X, y, opts);
    res.spec = spec;
    return res;
}

} // namespace rsglm
