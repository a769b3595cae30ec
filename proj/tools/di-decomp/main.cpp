// di-decomp: command-line front end over the C interface.

#include <didecomp/didecomp.h>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(dd_config* c) const { dd_config_free(c); }
};
struct ResultDeleter {
    void operator()(dd_result* r) const { dd_result_free(r); }
};
using ConfigPtr = std::unique_ptr<dd_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<dd_result, ResultDeleter>;

int report_failure(dd_status status) {
    std::cerr << "di-decomp: " << dd_status_name(status) << ": " << dd_last_error() << "\n";
    return static_cast<int>(status);
}

struct StageOptions {
    std::string config;
    std::string start;
    std::string end;
    std::string out;
    bool strict = false;
    bool lenient = false;
    bool json = false;
};

void add_stage_options(CLI::App* cmd, StageOptions& o) {
    cmd->add_option("-c,--config", o.config, "Configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--start", o.start, "Sample start date (YYYY-MM-DD)");
    cmd->add_option("--end", o.end, "Sample end date (YYYY-MM-DD)");
    cmd->add_option("-o,--out", o.out, "Output directory");
    auto* strict = cmd->add_flag("--strict", o.strict, "Fail on any malformed input row");
    cmd->add_flag("--lenient", o.lenient, "Skip malformed input rows and report them")->excludes(strict);
    cmd->add_flag("--json", o.json, "Print the JSON report instead of the summary");
}

int run_stage(const StageOptions& o, dd_status (*stage)(const dd_config*, dd_result**), bool sample_dates) {
    dd_config* raw = nullptr;
    dd_status st = o.config.empty() ? dd_config_create(&raw) : dd_config_load(o.config.c_str(), &raw);
    if (st != DD_OK) return report_failure(st);
    ConfigPtr cfg(raw);

    std::vector<std::pair<const char*, std::string>> overrides;
    if (!o.start.empty()) overrides.emplace_back(sample_dates ? "sample.start" : "fetch.start", o.start);
    if (!o.end.empty()) overrides.emplace_back(sample_dates ? "sample.end" : "fetch.end", o.end);
    if (!o.out.empty()) overrides.emplace_back("output.dir", o.out);
    if (o.strict) overrides.emplace_back("parse.strict", "true");
    if (o.lenient) overrides.emplace_back("parse.strict", "false");
    for (const auto& [key, value] : overrides) {
        if ((st = dd_config_set(cfg.get(), key, value.c_str())) != DD_OK) return report_failure(st);
    }

    dd_result* res_raw = nullptr;
    if ((st = stage(cfg.get(), &res_raw)) != DD_OK) return report_failure(st);
    ResultPtr res(res_raw);
    if (o.json) {
        std::cout << dd_result_json(res.get()) << "\n";
    } else {
        std::cout << dd_result_summary(res.get());
        std::cout << "\nwrote:\n";
        for (size_t i = 0; i < dd_result_file_count(res.get()); ++i) std::cout << "  " << dd_result_file(res.get(), i) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decomposition of daily DI5Y changes into macro, domestic-risk and global-risk contributions"};
    app.set_version_flag("--version", std::string(dd_version()));
    app.require_subcommand(1);

    StageOptions fetch_o, factors_o, split_o, decompose_o, run_o;
    auto* fetch = app.add_subcommand("fetch-focus", "Download Focus survey medians and write focus_panel.csv");
    add_stage_options(fetch, fetch_o);
    auto* factors = app.add_subcommand("build-factors", "Estimate the PLS macro factor and write macro_factor.csv");
    add_stage_options(factors, factors_o);
    auto* split = app.add_subcommand("split-cds", "Split CDS returns into global and domestic components");
    add_stage_options(split, split_o);
    auto* decompose = app.add_subcommand("decompose", "Regress DI5Y changes on the stage outputs and accumulate");
    add_stage_options(decompose, decompose_o);
    auto* run = app.add_subcommand("run", "Full pipeline");
    add_stage_options(run, run_o);

    dd_fixture_params fx;
    dd_fixture_defaults(&fx);
    std::vector<double> betas(fx.betas, fx.betas + 4);
    std::string fixture_out = "fixture";
    auto* fixture = app.add_subcommand("fixture", "Write a seeded synthetic dataset with its ground truth");
    fixture->add_option("--seed", fx.seed, "Random seed")->capture_default_str();
    fixture->add_option("--n", fx.n, "Rows in the decomposition sample")->capture_default_str();
    fixture->add_option("--betas", betas, "beta_0 beta_M beta_D beta_G")->expected(4)->delimiter(',');
    fixture->add_option("--r2", fx.r2, "Target R-squared")->capture_default_str();
    fixture->add_option("-o,--out", fixture_out, "Output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*fetch) return run_stage(fetch_o, dd_fetch_focus, false);
    if (*factors) return run_stage(factors_o, dd_build_factors, true);
    if (*split) return run_stage(split_o, dd_split_cds, true);
    if (*decompose) return run_stage(decompose_o, dd_decompose, true);
    if (*run) return run_stage(run_o, dd_run, true);
    if (*fixture) {
        for (size_t i = 0; i < 4; ++i) fx.betas[i] = betas[i];
        dd_result* raw = nullptr;
        const dd_status st = dd_generate_fixture(&fx, fixture_out.c_str(), &raw);
        if (st != DD_OK) return report_failure(st);
        ResultPtr res(raw);
        std::cout << dd_result_summary(res.get());
        return 0;
    }
    return 0;
}
