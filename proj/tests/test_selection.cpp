#include <catch_amalgamated.hpp>

#include <cmath>

#include "rsglm/doe.hpp"
#include "rsglm/random.hpp"
#include "rsglm/selection.hpp"

using namespace rsglm;
using Catch::Approx;

namespace {

FitResult synthetic_fit(double loglik, int p) {
    FitResult f;
    f.loglik = loglik;
    f.p = p;
    f.converged = true;
    return f;
}

Dataset ccd_with_response(std::uint64_t seed, const std::vector<std::pair<std::string, double>>& effects,
                          double nu) {
    const std::vector<Factor> factors = {{"A", 0, 1, ""}, {"B", 0, 1, ""}, {"C", 0, 1, ""}};
    Dataset ds = design_to_dataset(generate_ccd(factors, 4, AlphaChoice::spherical(), seed));
    const ModelSpec spec = full_second_order(ds.factor_names);
    const Eigen::MatrixXd X = build_design_matrix(ds, spec);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    for (const auto& [label, value] : effects) {
        const Term t = Term::parse(label);
        for (std::size_t j = 0; j < spec.terms.size(); ++j)
            if (spec.terms[j] == t) beta(static_cast<Eigen::Index>(j)) = value;
    }
    Rng rng(seed + 1);
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        y(i) = rng.gamma_mean_scale(std::exp(X.row(i).dot(beta)), nu);
    ds.responses.emplace("y", std::move(y));
    return ds;
}

} // namespace

TEST_CASE("AIC counts the dispersion parameter") {
    CHECK(aic(synthetic_fit(-91.492, 21)) == Approx(226.984).epsilon(1e-12));
    CHECK(aic(synthetic_fit(-96.371, 10)) == Approx(214.742).epsilon(1e-12));
    CHECK(aic(synthetic_fit(0.0, 0)) == Approx(2.0));
}

TEST_CASE("AIC refuses unusable fits") {
    FitResult f = synthetic_fit(-5.0, 2);
    f.converged = false;
    CHECK_THROWS_AS(aic(f), numeric_error);
    f = synthetic_fit(std::numeric_limits<double>::quiet_NaN(), 2);
    CHECK_THROWS_AS(aic(f), numeric_error);
}

TEST_CASE("backward elimination drops null terms and keeps real ones") {
    const Dataset ds = ccd_with_response(100, {{"Intercept", 2.0}, {"A", 0.8}, {"A^2", -0.3}}, 40.0);
    const ModelSpec full = full_second_order(ds.factor_names);
    const auto trace = backward_eliminate(ds, "y", full, {});

    CHECK(trace.final_spec.contains(Term::intercept()));
    CHECK(trace.final_spec.contains(Term::main("A")));
    CHECK(trace.final_spec.contains(Term::quadratic("A")));
    CHECK(trace.final_spec.size() < full.size());

    // The recorded AIC path is strictly decreasing.
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        CHECK(trace.steps[i].aic < trace.steps[i - 1].aic);
        CHECK(trace.steps[i].removed.has_value());
        CHECK(trace.steps[i].spec.size() == trace.steps[i - 1].spec.size() - 1);
    }
    CHECK_FALSE(trace.steps[0].removed.has_value());
    CHECK(trace.steps.back().spec == trace.final_spec);

    // The final model's AIC matches an independent refit.
    const FitResult refit = fit_model(ds, "y", trace.final_spec);
    CHECK(aic(refit) == Approx(trace.steps.back().aic).epsilon(1e-9));
}

TEST_CASE("forcing every term yields a single-step trace") {
    const Dataset ds = ccd_with_response(200, {{"Intercept", 1.5}}, 20.0);
    const ModelSpec full = full_second_order(ds.factor_names);
    const std::set<Term> all(full.terms.begin(), full.terms.end());
    const auto trace = backward_eliminate(ds, "y", full, all);
    CHECK(trace.steps.size() == 1);
    CHECK(trace.final_spec == full);
}

TEST_CASE("forced terms survive even when useless") {
    const Dataset ds = ccd_with_response(300, {{"Intercept", 1.5}, {"A", 0.9}}, 30.0);
    const ModelSpec full = full_second_order(ds.factor_names);
    const auto trace = backward_eliminate(ds, "y", full, {Term::main("C")});
    CHECK(trace.final_spec.contains(Term::main("C")));
    CHECK(trace.forced_retentions.count(Term::intercept()) == 1);
}

TEST_CASE("a forced term absent from the full model is rejected") {
    const Dataset ds = ccd_with_response(400, {{"Intercept", 1.0}}, 10.0);
    const ModelSpec small({Term::intercept(), Term::main("A")});
    CHECK_THROWS_AS(backward_eliminate(ds, "y", small, {Term::main("B")}), validation_error);
}

TEST_CASE("hierarchy freezes mains whose higher-order relatives survive") {
    // B matters only through its square; without hierarchy the main effect B
    // is dropped, with hierarchy it must stay while B^2 stays.
    const Dataset ds = ccd_with_response(
        500, {{"Intercept", 2.0}, {"A", 0.7}, {"B^2", 0.5}}, 60.0);
    const ModelSpec full = full_second_order(ds.factor_names);

    const auto strict = backward_eliminate(ds, "y", full, {}, true);
    REQUIRE(strict.final_spec.contains(Term::quadratic("B")));
    CHECK(strict.final_spec.contains(Term::main("B")));

    const auto loose = backward_eliminate(ds, "y", full, {}, false);
    if (loose.final_spec.contains(Term::quadratic("B")))
        CHECK_FALSE(loose.final_spec.contains(Term::main("B")));
}

TEST_CASE("selection does not mutate its inputs") {
    const Dataset ds = ccd_with_response(600, {{"Intercept", 1.0}, {"A", 0.5}}, 25.0);
    const Eigen::MatrixXd coded_before = ds.coded;
    const Eigen::VectorXd y_before = ds.responses.at("y");
    const ModelSpec full = full_second_order(ds.factor_names);
    const ModelSpec full_before = full;
    (void)backward_eliminate(ds, "y", full, {});
    CHECK(ds.coded == coded_before);
    CHECK(ds.responses.at("y") == y_before);
    CHECK(full == full_before);
}
