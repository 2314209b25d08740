// Command-line front-end: design generation, model fitting, AIC-guided
// selection, cross-validation, and the combined campaign report.
//
// Exit codes: 0 success, 1 validation error (bad input), 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsglm/doe.hpp"
#include "rsglm/glm.hpp"
#include "rsglm/inference.hpp"
#include "rsglm/io.hpp"
#include "rsglm/model.hpp"
#include "rsglm/selection.hpp"
#include "rsglm/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string data_path;
    std::string response;
    std::string out_dir = ".";
    std::string format = "table";
    std::optional<std::uint64_t> seed;
    std::string spec_source = "full"; // full | reduced | explicit
};

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rsglm::validation_error("cannot write '" + path.string() + "'");
    out << content;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

rsglm::ModelSpec resolve_spec(const rsglm::ProjectConfig& cfg, const std::string& source,
                              const rsglm::Dataset& data, const std::string& response) {
    if (source == "full") return rsglm::full_second_order(cfg.factor_names());
    if (source == "explicit") return cfg.model_spec();
    if (source == "reduced") {
        auto trace = rsglm::backward_eliminate(data, response, cfg.model_spec(), cfg.forced_set(),
                                               cfg.hierarchy, cfg.fit_options);
        return trace.final_spec;
    }
    throw rsglm::validation_error("unknown spec source '" + source + "' (full|reduced|explicit)");
}

int cmd_design(const CommonArgs& args) {
    const auto cfg = rsglm::load_config(args.config_path);
    const auto seed = args.seed.value_or(cfg.seed);
    const auto design = rsglm::generate_ccd(cfg.factors, cfg.n_center, cfg.alpha, seed);

    fs::create_directories(args.out_dir);
    std::ostringstream csv;
    rsglm::write_design_csv(design, csv);
    write_text(fs::path(args.out_dir) / "design.csv", csv.str());
    write_json_file(fs::path(args.out_dir) / "design.json", rsglm::design_to_json(design));

    std::cout << "wrote " << design.size() << "-run design (alpha=" << rsglm::format_sig(design.alpha)
              << ", seed=" << seed << ") to " << args.out_dir << "\n";
    return 0;
}

int cmd_fit(const CommonArgs& args) {
    const auto cfg = rsglm::load_config(args.config_path);
    if (args.response.empty()) throw rsglm::validation_error("--response is required");
    const auto data = rsglm::read_dataset(args.data_path, cfg.factor_names(),
                                          {args.response});
    const auto spec = resolve_spec(cfg, args.spec_source, data, args.response);
    const auto fit = rsglm::fit_model(data, args.response, spec, cfg.fit_options);
    if (fit.n < fit.p)
        std::cerr << "warning: fewer observations than coefficients (n=" << fit.n
                  << ", p=" << fit.p << ")\n";

    const json report = rsglm::fit_to_json(fit);
    fs::create_directories(args.out_dir);
    write_json_file(fs::path(args.out_dir) / ("fit_" + args.response + ".json"), report);

    if (args.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "Response: " << args.response << "\n";
        rsglm::write_fit_table(fit, std::cout);
    }
    return 0;
}

int cmd_select(const CommonArgs& args) {
    const auto cfg = rsglm::load_config(args.config_path);
    if (args.response.empty()) throw rsglm::validation_error("--response is required");
    const auto data = rsglm::read_dataset(args.data_path, cfg.factor_names(), {args.response});

    const auto trace = rsglm::backward_eliminate(data, args.response, cfg.model_spec(),
                                                 cfg.forced_set(), cfg.hierarchy, cfg.fit_options);
    for (const auto& w : trace.warnings) std::cerr << "warning: " << w << "\n";

    fs::create_directories(args.out_dir);
    write_json_file(fs::path(args.out_dir) / ("trace_" + args.response + ".json"),
                    rsglm::trace_to_json(trace));

    const auto reduced = rsglm::fit_model(data, args.response, trace.final_spec, cfg.fit_options);
    write_json_file(fs::path(args.out_dir) / ("fit_" + args.response + "_reduced.json"),
                    rsglm::fit_to_json(reduced));

    if (args.format == "json") {
        std::cout << rsglm::trace_to_json(trace).dump(2) << "\n";
    } else {
        std::cout << "Response: " << args.response << " (" << trace.steps.size() - 1
                  << " removals)\n";
        rsglm::write_fit_table(reduced, std::cout);
    }
    return 0;
}

int cmd_validate(const CommonArgs& args) {
    const auto cfg = rsglm::load_config(args.config_path);
    if (args.response.empty()) throw rsglm::validation_error("--response is required");
    const auto data = rsglm::read_dataset(args.data_path, cfg.factor_names(), {args.response});
    const auto spec = resolve_spec(cfg, args.spec_source, data, args.response);

    const auto rep = rsglm::loocv(data, args.response, spec, cfg.fit_options);
    if (rep.n_nonconverged_folds > 0)
        std::cerr << "warning: " << rep.n_nonconverged_folds
                  << " fold(s) did not converge and were excluded from CV(n)\n";

    fs::create_directories(args.out_dir);
    write_json_file(fs::path(args.out_dir) / ("validation_" + args.response + ".json"),
                    rsglm::validation_to_json(rep));
    std::ostringstream csv;
    rsglm::write_per_obs_csv(rep, csv);
    write_text(fs::path(args.out_dir) / ("per_obs_" + args.response + ".csv"), csv.str());

    if (args.format == "json") {
        std::cout << rsglm::validation_to_json(rep).dump(2) << "\n";
    } else {
        std::cout << "Response: " << args.response << "\n"
                  << "CV(n)   " << rsglm::format_sig(rep.cv_n) << "\n"
                  << "R2      " << rsglm::format_sig(rep.r2) << "\n"
                  << "R2_adj  " << rsglm::format_sig(rep.adj_r2) << "\n";
    }
    return 0;
}

int cmd_report(const CommonArgs& args) {
    const auto cfg = rsglm::load_config(args.config_path);
    if (cfg.responses.empty())
        throw rsglm::validation_error("config must list responses for 'report'");
    const auto data = rsglm::read_dataset(args.data_path, cfg.factor_names(), cfg.responses);
    fs::create_directories(args.out_dir);

    struct Row {
        std::string property, model;
        int np;
        double aic, r2, adj_r2, cv;
    };
    std::vector<Row> rows;
    std::vector<std::string> failures;
    json jreport;

    for (const auto& response : cfg.responses) {
        try {
            if (!data.responses.count(response))
                throw rsglm::validation_error("data file has no column '" + response + "'");

            const auto full_spec = cfg.model_spec();
            const auto full_fit = rsglm::fit_model(data, response, full_spec, cfg.fit_options);
            const auto full_val = rsglm::loocv(data, response, full_spec, cfg.fit_options);

            const auto trace = rsglm::backward_eliminate(data, response, full_spec, cfg.forced_set(),
                                                         cfg.hierarchy, cfg.fit_options);
            const auto red_fit = rsglm::fit_model(data, response, trace.final_spec, cfg.fit_options);
            const auto red_val = rsglm::loocv(data, response, trace.final_spec, cfg.fit_options);

            rows.push_back({response, "full", full_fit.p, rsglm::aic(full_fit), full_val.r2,
                            full_val.adj_r2, full_val.cv_n});
            rows.push_back({response, "reduced", red_fit.p, rsglm::aic(red_fit), red_val.r2,
                            red_val.adj_r2, red_val.cv_n});

            json jr;
            jr["full"] = {{"fit", rsglm::fit_to_json(full_fit)},
                          {"validation", rsglm::validation_to_json(full_val)}};
            jr["reduced"] = {{"fit", rsglm::fit_to_json(red_fit)},
                             {"validation", rsglm::validation_to_json(red_val)},
                             {"trace", rsglm::trace_to_json(trace)}};
            jreport[response] = std::move(jr);

            std::ostringstream csv;
            rsglm::write_per_obs_csv(red_val, csv);
            write_text(fs::path(args.out_dir) / ("per_obs_" + response + ".csv"), csv.str());
        } catch (const std::exception& e) {
            failures.push_back(response + ": " + e.what());
            std::cerr << "error: response '" << response << "' failed: " << e.what() << "\n";
        }
    }

    std::ostringstream table;
    table << "Property,Model,N_p,AIC,R2,R2_adj,CV(n)\n";
    for (const auto& r : rows)
        table << r.property << "," << r.model << "," << r.np << "," << rsglm::format_sig(r.aic)
              << "," << rsglm::format_sig(r.r2) << "," << rsglm::format_sig(r.adj_r2) << ","
              << rsglm::format_sig(r.cv) << "\n";
    write_text(fs::path(args.out_dir) / "summary.csv", table.str());
    write_json_file(fs::path(args.out_dir) / "report.json", jreport);
    std::cout << table.str();

    return failures.empty() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Central composite designs and gamma regression for coating campaigns"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool needs_data) {
        sub->add_option("--config", args.config_path, "project config (JSON)")->required();
        if (needs_data)
            sub->add_option("--data", args.data_path, "campaign data CSV")->required();
        sub->add_option("--out", args.out_dir, "output directory (default: .)");
        sub->add_option("--format", args.format, "table|json")
            ->check(CLI::IsMember({"table", "json"}));
        sub->add_option("--seed", args.seed, "override config seed");
    };

    auto* design = app.add_subcommand("design", "generate a central composite design");
    add_common(design, false);

    auto* fitc = app.add_subcommand("fit", "fit a gamma GLM for one response");
    add_common(fitc, true);
    fitc->add_option("--response", args.response, "response column")->required();
    fitc->add_option("--spec", args.spec_source, "full|reduced|explicit (default full)");

    auto* select = app.add_subcommand("select", "AIC backward elimination for one response");
    add_common(select, true);
    select->add_option("--response", args.response, "response column")->required();

    auto* validate = app.add_subcommand("validate", "LOOCV for one response");
    add_common(validate, true);
    validate->add_option("--response", args.response, "response column")->required();
    validate->add_option("--spec", args.spec_source, "full|reduced|explicit (default full)");

    auto* report = app.add_subcommand("report", "full+reduced fit, selection and LOOCV for all responses");
    add_common(report, true);

    try {
        app.parse(argc, argv);
        if (design->parsed()) return cmd_design(args);
        if (fitc->parsed()) return cmd_fit(args);
        if (select->parsed()) return cmd_select(args);
        if (validate->parsed()) return cmd_validate(args);
        if (report->parsed()) return cmd_report(args);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const rsglm::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const rsglm::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
