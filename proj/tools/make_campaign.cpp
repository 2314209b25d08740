// Generates the bundled synthetic campaign under data/: a 49-run spherical
// CCD over the five process factors with eight gamma-distributed synthetic
// responses, plus the matching project config. Deterministic for a given
// seed; the repository ships the output of `make_campaign data 42`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsglm/doe.hpp"
#include "rsglm/io.hpp"
#include "rsglm/model.hpp"
#include "rsglm/random.hpp"

using namespace rsglm;

namespace {

struct ResponseModel {
    std::string name;
    double nu;
    std::vector<std::pair<std::string, double>> effects; // term label -> coefficient
};

} // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 42;

    const std::vector<Factor> factors = {
        {"PFR", 60.0, 15.0, "g/min"},
        {"SOD", 220.0, 40.0, "mm"},
        {"Lambda", 0.94, 0.10, ""},
        {"CV", 100.0, 25.0, "m/min"},
        {"TGF", 683.0, 68.0, "nl/min"},
    };

    const Design design = generate_ccd(factors, 7, AlphaChoice::spherical(), seed);
    Dataset data = design_to_dataset(design);

    // Sparse truths in the style of a coating campaign: a handful of strong
    // main effects, some curvature, the occasional interaction.
    const std::vector<ResponseModel> models = {
        {"deposition_rate", 40, {{"Intercept", 3.6}, {"PFR", 0.27}, {"TGF", 0.13}, {"PFR^2", -0.03}, {"CV^2", -0.05}}},
        {"deposition_efficiency", 40, {{"Intercept", -0.47}, {"Lambda", 0.06}, {"TGF", 0.13}, {"CV^2", -0.05}}},
        {"velocity", 60, {{"Intercept", 6.13}, {"SOD", 0.05}, {"TGF", 0.05}, {"SOD^2", -0.03}}},
        {"temperature", 80, {{"Intercept", 7.45}, {"Lambda", 0.025}, {"TGF", 0.05}, {"TGF^2", -0.013}}},
        {"thickness", 40, {{"Intercept", 4.89}, {"PFR", 0.23}, {"CV", -0.27}, {"TGF^2", -0.05}}},
        {"roughness", 50, {{"Intercept", 3.53}, {"TGF", -0.10}, {"Lambda:TGF", -0.066}, {"SOD^2", 0.032}}},
        {"hardness", 60, {{"Intercept", 6.35}, {"TGF", 0.12}, {"PFR", -0.037}, {"Lambda:TGF", 0.025}}},
        {"porosity", 25, {{"Intercept", 2.70}, {"TGF", -0.046}, {"CV^2", 0.038}, {"PFR:CV", 0.029}}},
    };

    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& m : models) {
        ModelSpec spec = full_second_order(data.factor_names);
        const Eigen::MatrixXd X = build_design_matrix(data, spec);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
        for (const auto& [label, value] : m.effects) {
            const Term t = Term::parse(label);
            bool found = false;
            for (std::size_t j = 0; j < spec.terms.size(); ++j) {
                if (spec.terms[j] == t) {
                    beta(static_cast<Eigen::Index>(j)) = value;
                    found = true;
                }
            }
            if (!found) {
                std::cerr << "unknown term " << label << "\n";
                return 1;
            }
        }
        const Eigen::VectorXd mu = (X * beta).array().exp();
        Eigen::VectorXd y(mu.size());
        for (Eigen::Index i = 0; i < mu.size(); ++i) y(i) = rng.gamma_mean_scale(mu(i), m.nu);
        data.responses.emplace(m.name, std::move(y));
    }

    std::filesystem::create_directories(out_dir);

    // Campaign CSV: the design columns with response columns appended.
    std::ostringstream csv;
    csv << "run_id,run_order,point_class";
    for (const auto& f : factors) csv << "," << f.name;
    for (const auto& m : models) csv << "," << m.name;
    csv << "\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const std::string& rid = data.run_ids[static_cast<std::size_t>(i)];
        csv << rid << "," << i << "," << rid.substr(0, rid.find('-'));
        for (Eigen::Index j = 0; j < data.k(); ++j) csv << "," << format_full(data.coded(i, j));
        for (const auto& m : models) csv << "," << format_full(data.responses.at(m.name)(i));
        csv << "\n";
    }
    {
        std::ofstream out(std::filesystem::path(out_dir) / "campaign.csv", std::ios::binary);
        out << csv.str();
    }

    nlohmann::json cfg;
    cfg["factors"] = nlohmann::json::array();
    for (const auto& f : factors)
        cfg["factors"].push_back({{"name", f.name}, {"center", f.center}, {"step", f.step}, {"unit", f.unit}});
    for (const auto& m : models) cfg["responses"].push_back(m.name);
    cfg["model"] = "full-second-order";
    cfg["forced_terms"] = nlohmann::json::array();
    cfg["fit"] = {{"algorithm", "fisher-scoring"}, {"max_iter", 50}, {"tol", 1e-8}};
    cfg["selection"] = {{"hierarchy", true}};
    cfg["design"] = {{"n_center", 7}, {"alpha", "spherical"}};
    cfg["seed"] = seed;
    {
        std::ofstream out(std::filesystem::path(out_dir) / "config.json", std::ios::binary);
        out << cfg.dump(2) << "\n";
    }

    std::cout << "wrote " << out_dir << "/campaign.csv and " << out_dir << "/config.json (seed "
              << seed << ")\n";
    return 0;
}
