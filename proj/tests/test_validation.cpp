#include <catch_amalgamated.hpp>

#include <cmath>

#include "rsglm/doe.hpp"
#include "rsglm/random.hpp"
#include "rsglm/validation.hpp"

using namespace rsglm;
using Catch::Approx;

namespace {

Dataset line_dataset(std::uint64_t seed, Eigen::Index n, double slope, double nu) {
    Rng rng(seed);
    Dataset ds;
    ds.factor_names = {"x"};
    ds.coded.resize(n, 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ds.coded(i, 0) = rng.normal();
        y(i) = rng.gamma_mean_scale(std::exp(0.7 + slope * ds.coded(i, 0)), nu);
        ds.run_ids.push_back("r" + std::to_string(i));
    }
    ds.responses.emplace("y", std::move(y));
    return ds;
}

const ModelSpec kLine({Term::intercept(), Term::main("x")});
const ModelSpec kNull({Term::intercept()});

} // namespace

TEST_CASE("intercept-only LOOCV on (1, 2, 3) gives CV = 1.5") {
    Dataset ds;
    ds.factor_names = {"x"};
    ds.coded = Eigen::MatrixXd::Zero(3, 1);
    ds.coded << -1, 0, 1;
    ds.run_ids = {"a", "b", "c"};
    Eigen::VectorXd y(3);
    y << 1.0, 2.0, 3.0;
    ds.responses.emplace("y", y);

    const auto rep = loocv(ds, "y", kNull);
    // Each held-out prediction is the mean of the remaining two values.
    CHECK(rep.cv_n == Approx(1.5).epsilon(1e-9));
    CHECK(rep.n_nonconverged_folds == 0);
    REQUIRE(rep.per_obs.size() == 3);
    CHECK(rep.per_obs[0].loocv_prediction == Approx(2.5).epsilon(1e-8));
    CHECK(rep.per_obs[1].loocv_prediction == Approx(2.0).epsilon(1e-8));
    CHECK(rep.per_obs[2].loocv_prediction == Approx(1.5).epsilon(1e-8));
    CHECK(rep.per_obs[0].run_id == "a");
}

TEST_CASE("LOOCV matches an independently coded leave-one-out loop") {
    const Dataset ds = line_dataset(5, 20, 0.6, 15.0);
    const auto rep = loocv(ds, "y", kLine);

    const Eigen::MatrixXd X = build_design_matrix(ds, kLine);
    const Eigen::VectorXd& y = ds.responses.at("y");
    double sse = 0.0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        Eigen::MatrixXd Xt(ds.n() - 1, X.cols());
        Eigen::VectorXd yt(ds.n() - 1);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < ds.n(); ++j) {
            if (j == i) continue;
            Xt.row(r) = X.row(j);
            yt(r) = y(j);
            ++r;
        }
        const FitResult f = fit(Xt, yt);
        REQUIRE(f.converged);
        const double pred = std::exp(X.row(i).dot(f.beta));
        CHECK(rep.per_obs[static_cast<std::size_t>(i)].loocv_prediction ==
              Approx(pred).epsilon(1e-9));
        sse += (y(i) - pred) * (y(i) - pred);
    }
    CHECK(rep.cv_n == Approx(sse / static_cast<double>(ds.n())).epsilon(1e-10));
}

TEST_CASE("duplicated observations predict each other exactly in LOOCV") {
    // With each row duplicated, leaving one copy out barely moves the fit, so
    // held-out predictions sit close to the in-sample ones.
    Dataset ds = line_dataset(9, 10, 0.5, 20.0);
    Dataset dup;
    dup.factor_names = ds.factor_names;
    dup.coded.resize(20, 1);
    Eigen::VectorXd y(20);
    for (Eigen::Index i = 0; i < 10; ++i) {
        dup.coded(2 * i, 0) = dup.coded(2 * i + 1, 0) = ds.coded(i, 0);
        y(2 * i) = y(2 * i + 1) = ds.responses.at("y")(i);
        dup.run_ids.push_back("d" + std::to_string(2 * i));
        dup.run_ids.push_back("d" + std::to_string(2 * i + 1));
    }
    dup.responses.emplace("y", y);
    const auto rep = loocv(dup, "y", kLine);
    for (const auto& o : rep.per_obs)
        CHECK(std::abs(o.loocv_prediction - o.fitted_in_sample) <
              0.35 * std::abs(o.fitted_in_sample));
}

TEST_CASE("r_squared and adj_r_squared arithmetic") {
    Eigen::VectorXd obs(4), fitted(4);
    obs << 1, 2, 3, 4;
    fitted << 1, 2, 3, 4;
    CHECK(r_squared(obs, fitted) == 1.0);
    fitted << 2.5, 2.5, 2.5, 2.5; // predicting the mean
    CHECK(r_squared(obs, fitted) == Approx(0.0).margin(1e-14));

    CHECK(adj_r_squared(0.97, 49, 21) == Approx(1.0 - (48.0 / 28.0) * 0.03).epsilon(1e-12));
    CHECK(adj_r_squared(0.97, 49, 21) == Approx(0.948571).margin(1e-6));
    CHECK(adj_r_squared(1.0, 30, 5) == 1.0);
    CHECK(adj_r_squared(0.8, 20, 1) == Approx(0.8).epsilon(1e-14)); // intercept only: no penalty

    double prev = 1.0;
    for (int p = 1; p < 19; ++p) {
        const double a = adj_r_squared(0.9, 20, p);
        CHECK(a <= prev);
        prev = a;
    }
}

TEST_CASE("r_squared and adj_r_squared input validation") {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 2.0);
    CHECK_THROWS_AS(r_squared(c, c), validation_error);
    Eigen::VectorXd a(2), b(3);
    CHECK_THROWS_AS(r_squared(a, b), validation_error);
    CHECK_THROWS_AS(adj_r_squared(0.9, 5, 5), validation_error);
    CHECK_THROWS_AS(adj_r_squared(0.9, 5, 7), validation_error);
}

TEST_CASE("k-fold folds are seeded and reproducible") {
    const Dataset ds = line_dataset(13, 24, 0.5, 15.0);
    const auto a = cross_validate(ds, "y", kLine, {}, 4, 7);
    const auto b = cross_validate(ds, "y", kLine, {}, 4, 7);
    CHECK(a.cv_n == b.cv_n);
    for (std::size_t i = 0; i < a.per_obs.size(); ++i)
        CHECK(a.per_obs[i].loocv_prediction == b.per_obs[i].loocv_prediction);

    const auto c = cross_validate(ds, "y", kLine, {}, 4, 8);
    CHECK(c.cv_n == Approx(a.cv_n).epsilon(1.0)); // same order of magnitude, possibly different
    CHECK(a.r2 == c.r2); // in-sample quantities ignore the fold seed
    CHECK(a.adj_r2 == c.adj_r2);
}

TEST_CASE("cross-validation input validation") {
    const Dataset ds = line_dataset(17, 12, 0.5, 15.0);
    CHECK_THROWS_AS(cross_validate(ds, "y", kLine, {}, 1, 0), validation_error);
    CHECK_THROWS_AS(cross_validate(ds, "y", kLine, {}, 13, 0), validation_error);
}

TEST_CASE("point classes are carried into the per-observation records") {
    const std::vector<Factor> factors = {{"A", 0, 1, ""}, {"B", 0, 1, ""}};
    Dataset ds = design_to_dataset(generate_ccd(factors, 3, AlphaChoice::spherical(), 3));
    Rng rng(4);
    Eigen::VectorXd y(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        y(i) = rng.gamma_mean_scale(std::exp(1.0 + 0.4 * ds.coded(i, 0)), 30.0);
    ds.responses.emplace("y", std::move(y));

    const auto rep = loocv(ds, "y", ModelSpec({Term::intercept(), Term::main("A")}));
    int cube = 0, star = 0, center = 0;
    for (const auto& o : rep.per_obs) {
        if (o.point_class == "cube") ++cube;
        else if (o.point_class == "star") ++star;
        else if (o.point_class == "center") ++center;
    }
    CHECK(cube == 4);
    CHECK(star == 4);
    CHECK(center == 3);
}
