#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsglm/errors.hpp"
#include "rsglm/model.hpp"
#include "rsglm/random.hpp"

// Central composite designs: full-factorial cube, axial star points at
// +/-alpha, replicated centers, and a seeded Fisher-Yates run-order shuffle.

namespace rsglm {

enum class PointClass { Center, Cube, Star };

inline std::string to_string(PointClass c) {
    switch (c) {
        case PointClass::Center: return "center";
        case PointClass::Cube: return "cube";
        case PointClass::Star: return "star";
    }
    return {};
}

struct DesignPoint {
    Eigen::VectorXd coded;
    PointClass point_class = PointClass::Center;
};

/// Star-point distance: spherical (alpha = sqrt(k)) or a fixed positive value.
struct AlphaChoice {
    static AlphaChoice spherical() { return AlphaChoice{true, 0.0}; }
    static AlphaChoice custom(double value) {
        if (!(value > 0.0)) throw validation_error("custom alpha must be > 0");
        return AlphaChoice{false, value};
    }

    double resolve(std::size_t k) const {
        return spherical_ ? std::sqrt(static_cast<double>(k)) : value_;
    }
    bool is_spherical() const { return spherical_; }

private:
    AlphaChoice(bool s, double v) : spherical_(s), value_(v) {}
    bool spherical_;
    double value_;
};

struct Design {
    std::vector<Factor> factors;
    std::vector<DesignPoint> points; // construction order: cube, star, center
    double alpha = 0.0;
    std::size_t n_center = 0;
    std::vector<std::size_t> run_order; // permutation of point indices
    std::uint64_t seed = 0;

    std::size_t k() const { return factors.size(); }
    std::size_t size() const { return points.size(); }
};

/// Generate a CCD over the given factors: all 2^k sign combinations as cube
/// points, 2k axial points at +/-alpha, n_center replicated centers. Run order
/// is a Fisher-Yates shuffle seeded by `seed` (see rsglm::Rng for the engine).
inline Design generate_ccd(std::vector<Factor> factors, std::size_t n_center,
                           AlphaChoice alpha, std::uint64_t seed) {
    if (factors.empty()) throw validation_error("CCD requires at least one factor");
    if (n_center < 1) throw validation_error("CCD requires at least one center point");
    check_unique_names(factors);

    const std::size_t k = factors.size();
    if (k > 24) throw validation_error("CCD cube would be astronomically large (k > 24)");
    const double a = alpha.resolve(k);

    Design d;
    d.factors = std::move(factors);
    d.alpha = a;
    d.n_center = n_center;
    d.seed = seed;

    const std::size_t n_cube = std::size_t{1} << k;
    d.points.reserve(n_cube + 2 * k + n_center);
    for (std::size_t mask = 0; mask < n_cube; ++mask) {
        Eigen::VectorXd v(k);
        for (std::size_t j = 0; j < k; ++j)
            v(static_cast<Eigen::Index>(j)) = (mask >> j) & 1 ? 1.0 : -1.0;
        d.points.push_back({std::move(v), PointClass::Cube});
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (double sign : {-1.0, +1.0}) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
            v(static_cast<Eigen::Index>(j)) = sign * a;
            d.points.push_back({std::move(v), PointClass::Star});
        }
    }
    for (std::size_t c = 0; c < n_center; ++c)
        d.points.push_back({Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)), PointClass::Center});

    d.run_order.resize(d.points.size());
    std::iota(d.run_order.begin(), d.run_order.end(), std::size_t{0});
    Rng rng(seed);
    fisher_yates(d.run_order, rng);
    return d;
}

/// Run identifier encoding point class and the point's construction index,
/// e.g. "cube-03", "star-00", "center-05".
inline std::string design_run_id(const Design& d, std::size_t point_index) {
    const auto& p = d.points[point_index];
    std::size_t class_index = 0;
    for (std::size_t i = 0; i < point_index; ++i)
        if (d.points[i].point_class == p.point_class) ++class_index;
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02zu", class_index);
    return to_string(p.point_class) + "-" + buf;
}

/// Flatten a design into a dataset (responses empty), rows emitted in
/// run_order. The shuffle permutes rows, never alters them.
inline Dataset design_to_dataset(const Design& d) {
    Dataset ds;
    ds.factor_names.reserve(d.k());
    for (const auto& f : d.factors) ds.factor_names.push_back(f.name);
    const auto n = static_cast<Eigen::Index>(d.size());
    ds.coded.resize(n, static_cast<Eigen::Index>(d.k()));
    ds.run_ids.reserve(d.size());
    for (std::size_t r = 0; r < d.size(); ++r) {
        const std::size_t idx = d.run_order[r];
        ds.coded.row(static_cast<Eigen::Index>(r)) = d.points[idx].coded.transpose();
        ds.run_ids.push_back(design_run_id(d, idx));
    }
    return ds;
}

} // namespace rsglm
