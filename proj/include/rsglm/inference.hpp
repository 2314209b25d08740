#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsglm/distributions.hpp"
#include "rsglm/errors.hpp"
#include "rsglm/glm.hpp"

// Hypothesis tests on fitted coefficients: general linear Wald tests,
// per-coefficient t-tests with significance stars, and likelihood-ratio tests
// between nested fits.

namespace rsglm {

/// H0: C beta = d, with C of full row rank r.
struct LinearHypothesis {
    Eigen::MatrixXd C; // r x p
    Eigen::VectorXd d; // length r

    static LinearHypothesis single_coefficient(Eigen::Index j, Eigen::Index p, double value = 0.0) {
        LinearHypothesis h;
        h.C = Eigen::MatrixXd::Zero(1, p);
        h.C(0, j) = 1.0;
        h.d = Eigen::VectorXd::Constant(1, value);
        return h;
    }
};

enum class TestKind { Wald, T, LRT };

inline std::string to_string(TestKind k) {
    switch (k) {
        case TestKind::Wald: return "wald";
        case TestKind::T: return "t";
        case TestKind::LRT: return "lrt";
    }
    return {};
}

struct TestReport {
    std::string term; // filled for per-coefficient tests
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    TestKind kind = TestKind::Wald;
    std::string stars;
    double estimate = 0.0; // per-coefficient tests only
    double std_error = 0.0;
};

/// Wald test of C beta = d: w = (C b - d)^T [C cov C^T]^{-1} (C b - d),
/// asymptotically chi-square with r degrees of freedom.
inline TestReport wald_test(const FitResult& fit, const LinearHypothesis& hyp) {
    const Eigen::Index p = fit.beta.size();
    if (hyp.C.cols() != p) throw validation_error("hypothesis matrix has wrong column count");
    if (hyp.d.size() != hyp.C.rows()) throw validation_error("hypothesis d has wrong length");
    const Eigen::Index r = hyp.C.rows();
    if (r < 1 || r > p) throw validation_error("hypothesis must have 1 <= r <= p rows");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hyp.C);
    qr.setThreshold(1e-10);
    if (qr.rank() < r) throw numeric_error("hypothesis matrix C is rank deficient");
    if (!fit.cov_beta.allFinite())
        throw numeric_error("fit has no covariance matrix (dispersion unidentifiable)");

    const Eigen::VectorXd residual = hyp.C * fit.beta - hyp.d;
    const Eigen::MatrixXd M = hyp.C * fit.cov_beta * hyp.C.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw numeric_error("C cov C^T is singular");

    TestReport rep;
    rep.kind = TestKind::Wald;
    rep.statistic = residual.dot(lu.solve(residual));
    if (rep.statistic < 0.0 && rep.statistic > -1e-12) rep.statistic = 0.0;
    rep.df = static_cast<int>(r);
    rep.p_value = chi2_sf(rep.statistic, rep.df);
    rep.stars = significance_stars(rep.p_value);
    return rep;
}

/// Per-coefficient t-tests: t_j = beta_j / sqrt(cov_jj), two-sided p from
/// Student's t with n - p degrees of freedom.
inline std::vector<TestReport> t_tests(const FitResult& fit) {
    if (fit.n <= fit.p) throw validation_error("t-tests require n > p");
    if (!fit.cov_beta.allFinite())
        throw numeric_error("fit has no covariance matrix (dispersion unidentifiable)");
    const int df = fit.n - fit.p;
    std::vector<TestReport> out;
    out.reserve(static_cast<std::size_t>(fit.p));
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
        TestReport rep;
        rep.kind = TestKind::T;
        rep.term = fit.spec.terms.empty() ? "b" + std::to_string(j)
                                          : fit.spec.terms[static_cast<std::size_t>(j)].label();
        rep.estimate = fit.beta(j);
        rep.std_error = std::sqrt(fit.cov_beta(j, j));
        rep.statistic = rep.estimate / rep.std_error;
        rep.df = df;
        rep.p_value = t_two_sided_p(rep.statistic, df);
        rep.stars = significance_stars(rep.p_value);
        out.push_back(std::move(rep));
    }
    return out;
}

/// Likelihood-ratio test of a restricted model against a nesting full model.
/// Both log-likelihoods are evaluated at a common scale (the full model's
/// nu_hat) so the ratio isolates the mean structure.
inline TestReport likelihood_ratio_test(const FitResult& fit_full, const FitResult& fit_restricted) {
    if (fit_full.n != fit_restricted.n ||
        (fit_full.y - fit_restricted.y).cwiseAbs().maxCoeff() != 0.0)
        throw validation_error("LRT requires both fits on the same dataset");
    if (!fit_full.spec.terms.empty() && !fit_restricted.spec.terms.empty()) {
        if (!fit_restricted.spec.nested_in(fit_full.spec))
            throw validation_error("restricted model is not nested in the full model");
    } else if (fit_restricted.p > fit_full.p) {
        throw validation_error("restricted model has more terms than the full model");
    }

    const double nu = fit_full.dispersion_identifiable ? fit_full.nu_hat : 1.0;
    const double ll_full = log_likelihood(fit_full.beta, nu, fit_full.X, fit_full.y);
    const double ll_restr = log_likelihood(fit_restricted.beta, nu, fit_restricted.X, fit_restricted.y);

    TestReport rep;
    rep.kind = TestKind::LRT;
    rep.statistic = 2.0 * (ll_full - ll_restr);
    const double slack = 1e-6 * std::max(1.0, std::abs(ll_full));
    if (rep.statistic < -slack)
        throw numeric_error("negative LRT statistic: fits are inconsistent");
    if (rep.statistic < 0.0) rep.statistic = 0.0;
    rep.df = fit_full.p - fit_restricted.p;
    rep.p_value = rep.df == 0 ? 1.0 : chi2_sf(rep.statistic, rep.df);
    rep.stars = significance_stars(rep.p_value);
    return rep;
}

} // namespace rsglm
