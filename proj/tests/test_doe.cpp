#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "rsglm/doe.hpp"

using namespace rsglm;
using Catch::Approx;

namespace {

std::vector<Factor> five_factors() {
    return {{"PFR", 60.0, 15.0, "g/min"},
            {"SOD", 220.0, 40.0, "mm"},
            {"Lambda", 0.94, 0.10, ""},
            {"CV", 100.0, 25.0, "m/min"},
            {"TGF", 683.0, 68.0, "nl/min"}};
}

std::size_t count_class(const Design& d, PointClass c) {
    return static_cast<std::size_t>(
        std::count_if(d.points.begin(), d.points.end(),
                      [&](const DesignPoint& p) { return p.point_class == c; }));
}

} // namespace

TEST_CASE("five-factor spherical CCD with seven centers has 49 runs") {
    const Design d = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 42);
    CHECK(d.size() == 49);
    CHECK(count_class(d, PointClass::Cube) == 32);
    CHECK(count_class(d, PointClass::Star) == 10);
    CHECK(count_class(d, PointClass::Center) == 7);
    CHECK(d.alpha == Approx(std::sqrt(5.0)));
}

TEST_CASE("two-factor CCD with one center has 9 runs at alpha sqrt(2)") {
    const Design d =
        generate_ccd({{"a", 0, 1, ""}, {"b", 0, 1, ""}}, 1, AlphaChoice::spherical(), 1);
    CHECK(d.size() == 9);
    CHECK(d.alpha == Approx(std::sqrt(2.0)));
}

TEST_CASE("one-factor CCD with custom alpha 1 collapses star onto cube levels") {
    const Design d = generate_ccd({{"a", 0, 1, ""}}, 3, AlphaChoice::custom(1.0), 1);
    CHECK(d.size() == 7);
    CHECK(count_class(d, PointClass::Cube) == 2);
    CHECK(count_class(d, PointClass::Star) == 2);
    for (const auto& p : d.points)
        if (p.point_class == PointClass::Star) CHECK(std::abs(p.coded(0)) == Approx(1.0));
}

TEST_CASE("CCD input validation") {
    CHECK_THROWS_AS(generate_ccd({}, 1, AlphaChoice::spherical(), 0), validation_error);
    CHECK_THROWS_AS(generate_ccd({{"a", 0, 1, ""}}, 0, AlphaChoice::spherical(), 0),
                    validation_error);
    CHECK_THROWS_AS(AlphaChoice::custom(0.0), validation_error);
    CHECK_THROWS_AS(AlphaChoice::custom(-2.0), validation_error);
}

TEST_CASE("run order is a permutation that only reorders points") {
    const Design d = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 42);
    std::set<std::size_t> seen(d.run_order.begin(), d.run_order.end());
    CHECK(seen.size() == d.size());
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == d.size() - 1);

    const Design again = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 42);
    CHECK(again.run_order == d.run_order);

    const Design other = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 43);
    const Dataset a = design_to_dataset(d);
    const Dataset b = design_to_dataset(other);
    // Same multiset of rows regardless of seed.
    auto rows = [](const Dataset& ds) {
        std::multiset<std::vector<double>> out;
        for (Eigen::Index i = 0; i < ds.n(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(ds.k()));
            for (Eigen::Index j = 0; j < ds.k(); ++j) row[static_cast<std::size_t>(j)] = ds.coded(i, j);
            out.insert(std::move(row));
        }
        return out;
    };
    CHECK(rows(a) == rows(b));
}

TEST_CASE("coded columns are balanced") {
    const Design d = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 42);
    const Dataset ds = design_to_dataset(d);
    const double a2 = d.alpha * d.alpha;
    for (Eigen::Index j = 0; j < ds.k(); ++j) {
        CHECK(ds.coded.col(j).sum() == Approx(0.0).margin(1e-12));
        CHECK(ds.coded.col(j).squaredNorm() == Approx(32.0 + 2.0 * a2).epsilon(1e-12));
        for (Eigen::Index l = j + 1; l < ds.k(); ++l)
            CHECK(ds.coded.col(j).dot(ds.coded.col(l)) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("49-run design supports the 21-term second-order model") {
    const Design d = generate_ccd(five_factors(), 7, AlphaChoice::spherical(), 42);
    const Dataset ds = design_to_dataset(d);
    const Eigen::MatrixXd X = build_design_matrix(ds, full_second_order(ds.factor_names));
    REQUIRE(X.cols() == 21);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    CHECK(qr.rank() == 21);
}

TEST_CASE("run ids name class and construction index") {
    const Design d = generate_ccd({{"a", 0, 1, ""}, {"b", 0, 1, ""}}, 2, AlphaChoice::spherical(), 9);
    CHECK(design_run_id(d, 0) == "cube-00");
    CHECK(design_run_id(d, 3) == "cube-03");
    CHECK(design_run_id(d, 4) == "star-00");
    CHECK(design_run_id(d, 8) == "center-00");
    CHECK(design_run_id(d, 9) == "center-01");

    const Dataset ds = design_to_dataset(d);
    std::set<std::string> ids(ds.run_ids.begin(), ds.run_ids.end());
    CHECK(ids.size() == ds.run_ids.size());
}
