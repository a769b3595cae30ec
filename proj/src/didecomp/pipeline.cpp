#include "didecomp/pipeline.hpp"

#include "didecomp/errors.hpp"
#include "didecomp/log.hpp"
#include "didecomp/text_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <map>

namespace didecomp {

namespace {

template <typename F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        const std::string what = e.what();
        if (what.rfind("stage '", 0) == 0) throw;
        throw Error(e.kind(), std::string("stage '") + name + "': " + what);
    }
}

/// Exclusive ownership of an output directory for one run, plus
/// all-or-nothing emission of the collected files.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        ensure_output_dir(dir_);
        lock_ = dir_ / ".di-decomp.lock";
        fd_ = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw ConfigError("output directory '" + dir_.string() + "' is locked by another run (remove " +
                              lock_.string() + " if stale)");
        }
    }
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;
    ~OutputDir() {
        ::close(fd_);
        std::error_code ec;
        std::filesystem::remove(lock_, ec);
    }

    void add(const std::string& name, std::string content) { pending_.emplace_back(name, std::move(content)); }

    std::vector<std::filesystem::path> commit() {
        std::vector<std::filesystem::path> written;
        try {
            for (const auto& [name, content] : pending_) {
                const auto path = dir_ / name;
                const auto tmp = dir_ / (name + ".partial");
                write_text_file(tmp, content);
                std::filesystem::rename(tmp, path);
                written.push_back(path);
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) std::filesystem::remove(p, ec);
            for (const auto& [name, content] : pending_) std::filesystem::remove(dir_ / (name + ".partial"), ec);
            throw;
        }
        pending_.clear();
        return written;
    }

private:
    std::filesystem::path dir_;
    std::filesystem::path lock_;
    int fd_ = -1;
    std::vector<std::pair<std::string, std::string>> pending_;
};

MarketDataset load_market(const PipelineConfig& cfg, std::vector<std::string> columns, LoadReport& report) {
    MarketSchema schema;
    schema.columns = std::move(columns);
    return in_stage("load", [&] { return load_market_csv(cfg.market_csv, schema, cfg.strict, report); });
}

FocusPanel load_focus(const PipelineConfig& cfg, const HttpGet& get, LoadReport& report) {
    return in_stage("focus", [&] {
        if (cfg.fetch_enabled) return fetch_focus(cfg.fetch, get, report);
        if (!cfg.focus_cache) throw ConfigError("no Focus source: set data.focus_cache or fetch.enabled");
        return read_focus_panel_csv(*cfg.focus_cache, cfg.strict, report);
    });
}

std::vector<std::string> market_columns_for_macro(const PipelineConfig& cfg) {
    std::vector<std::string> cols = {"DI5Y"};
    if (std::find(cfg.macro_columns.begin(), cfg.macro_columns.end(), kSurpriseDiffColumn) != cfg.macro_columns.end()) {
        cols.emplace_back("SURPRISE");
    }
    return cols;
}

std::filesystem::path stage_input(const std::optional<std::filesystem::path>& configured,
                                  const PipelineConfig& cfg, const char* default_name) {
    return configured ? *configured : cfg.output_dir / default_name;
}

std::string fmt_p(double p) {
    if (p < 1e-4) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2e", p);
        return buf;
    }
    return format_fixed(p, 4);
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

Json build_report(const DecompositionBlock& d, const MacroBlock* macro, const CdsBlock* cds,
                  const LoadReport& market_load, const LoadReport* focus_load, const PipelineConfig& cfg) {
    static const std::map<std::string, std::pair<const char*, const char*>> kLabels = {
        {kInterceptName, {"beta_0", "Constant (intercept)"}},
        {kMacroColumn, {"beta_M", "Macro Factor"}},
        {kDomColumn, {"beta_D", "Domestic CDS"}},
        {kGlobColumn, {"beta_G", "Global CDS"}},
    };

    Json r;
    r["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
    r["sample"] = {{"start", d.contributions.dates.front().iso()},
                   {"end", d.contributions.dates.back().iso()},
                   {"observations", d.contributions.rows()}};

    const auto& fit = d.model.fit;
    Json coefs = Json::array();
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        const auto& lab = kLabels.at(fit.names[i]);
        Json c;
        c["name"] = fit.names[i];
        c["symbol"] = lab.first;
        c["label"] = lab.second;
        c["value"] = fit.coefficients[i];
        c["std_error"] = fit.standard_errors[i];
        c["t"] = std::isfinite(fit.t_statistics[i]) ? Json(fit.t_statistics[i]) : Json(nullptr);
        c["p"] = fit.p_values[i];
        c["significance"] = cfg.significance.label(fit.p_values[i]);
        coefs.push_back(std::move(c));
    }
    r["regression"] = {{"coefficients", std::move(coefs)},
                       {"r_squared", fit.r_squared},
                       {"adj_r_squared", fit.adj_r_squared},
                       {"observations", fit.n_observations},
                       {"residual_dof", fit.residual_dof()}};
    r["std_dev_bps"] = to_json(d.std_dev);
    r["variance_shares"] = to_json(d.shares);

    const auto& cum = d.cumulative;
    const std::size_t last = cum.rows() - 1;
    r["cumulative_final"] = {{"date", cum.dates[last].iso()},
                             {"di5y_change_cum", cum.di5y_change_cum[last]},
                             {"const_cum", cum.const_cum[last]},
                             {"macro_cum", cum.macro_cum[last]},
                             {"riscobr_cum", cum.riscobr_cum[last]},
                             {"global_cum", cum.global_cum[last]},
                             {"residual_cum", cum.residual_cum[last]}};

    if (macro) {
        r["macro_factor"] = {{"series", kMacroFactorName},
                             {"window_start", macro->window_start.iso()},
                             {"window_end", macro->window_end.iso()},
                             {"window_observations", macro->model.n_observations},
                             {"columns", macro->model.columns.size()},
                             {"sign", macro->model.sign}};
    } else {
        r["macro_factor"] = nullptr;
    }
    if (cds) {
        r["cds_split"] = {{"observations", cds->model.fit.n_observations},
                          {"r_squared", cds->model.fit.r_squared},
                          {"start", cds->parts.glob[0].date.iso()},
                          {"end", cds->parts.glob[cds->parts.glob.size() - 1].date.iso()}};
    } else {
        r["cds_split"] = nullptr;
    }

    Json load;
    load["market"] = to_json(market_load);
    if (focus_load) load["focus"] = to_json(*focus_load);
    load["focus_dropped_dates"] = macro ? Json(macro->focus_dropped_dates) : Json(nullptr);
    r["load"] = std::move(load);

    Json echo;
    for (const auto& [k, v] : cfg.echo) echo[k] = v;
    r["config"] = std::move(echo);
    return r;
}

std::string build_summary(const DecompositionBlock& d, const PipelineConfig& cfg) {
    const auto& fit = d.model.fit;
    static const std::map<std::string, const char*> kNames = {{kInterceptName, "Constant (beta_0)"},
                                                              {kMacroColumn, "Macro factor (beta_M)"},
                                                              {kDomColumn, "Domestic CDS (beta_D)"},
                                                              {kGlobColumn, "Global CDS (beta_G)"}};
    std::string s;
    s += "DI5Y decomposition " + d.contributions.dates.front().iso() + " to " + d.contributions.dates.back().iso() +
         " (N = " + std::to_string(d.contributions.rows()) + ")\n\n";
    s += pad("Coefficient", 26) + pad("Value", 16) + pad("p-value", 12) + "Significance\n";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        s += pad(kNames.at(fit.names[i]), 26) + pad(format_fixed(fit.coefficients[i], 6), 16) +
             pad(fmt_p(fit.p_values[i]), 12) + cfg.significance.label(fit.p_values[i]) + "\n";
    }
    s += "R2 " + format_fixed(fit.r_squared, 6) + "   adj. R2 " + format_fixed(fit.adj_r_squared, 6) + "\n\n";

    const auto& sd = d.std_dev;
    s += "Daily std dev (bps): dDI5Y " + format_fixed(sd.d_di5y, 1) + ", Macro " + format_fixed(sd.macro, 1) +
         ", RiscoBR " + format_fixed(sd.riscobr, 1) + ", Global " + format_fixed(sd.global, 1) + ", Residual " +
         format_fixed(sd.residual, 1) + ", Fitted " + format_fixed(sd.fitted, 1) + "\n";
    s += "Explained-variance shares: Macro " + format_fixed(100.0 * d.shares.share[0], 1) + "%, RiscoBR " +
         format_fixed(100.0 * d.shares.share[1], 1) + "%, Global " + format_fixed(100.0 * d.shares.share[2], 1) +
         "%\n\n";

    const auto& c = d.cumulative;
    const std::size_t last = c.rows() - 1;
    s += "Cumulative to " + c.dates[last].iso() + ": DI5Y_change_cum = " + format_signed(c.di5y_change_cum[last], 1) +
         " bps\n";
    s += "  Const " + format_signed(c.const_cum[last], 1) + ", Macro " + format_signed(c.macro_cum[last], 1) +
         ", RiscoBR " + format_signed(c.riscobr_cum[last], 1) + ", Global " + format_signed(c.global_cum[last], 1) +
         ", Residual " + format_signed(c.residual_cum[last], 1) + "\n";
    return s;
}

Frame cds_components_frame(const CdsBlock& cds) {
    return Frame(cds.parts.glob.dates(), {"CDS", kCdsGlobName, kCdsDomName},
                 {cds.cds.values(), cds.parts.glob.values(), cds.parts.dom.values()});
}

Json models_json(const MacroBlock* macro, const CdsBlock* cds, const DecompositionBlock& d,
                 const PipelineConfig& cfg) {
    Json m;
    m["software"] = {{"name", kSoftwareName}, {"version", kSoftwareVersion}};
    m["pls"] = macro ? to_json(macro->model) : Json(nullptr);
    m["cds_split"] = cds ? to_json(cds->model) : Json(nullptr);
    m["decomposition"] = to_json(d.model, cfg.significance);
    return m;
}

void add_decomposition_outputs(OutputDir& out, const DecompositionBlock& d, const Json& report, const Json& models) {
    out.add(kContributionsFile, contributions_csv(d.contributions));
    out.add(kCumulativeFile, cumulative_csv(d.cumulative));
    out.add(kModelsFile, models.dump(2) + "\n");
    out.add(kReportFile, report.dump(2) + "\n");
    out.add(kSvgFile, render_svg(d.cumulative));
}

}  // namespace

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

MacroBlock build_macro_block(const MarketDataset& market, const HorizonFrame& focus, const PipelineConfig& cfg) {
    const auto& di5y = market.get("DI5Y");
    const auto d_di5y = to_bps_change(di5y).renamed(kTargetColumn);

    Frame levels = focus.frame;
    if (cfg.focus_diff_order == FocusDiffOrder::AfterJoin) {
        std::vector<std::string> cols = levels.names();
        std::vector<DailySeries> parts;
        parts.reserve(cols.size() + 1);
        for (const auto& c : cols) parts.push_back(levels.series(c));
        parts.push_back(di5y.renamed("__market_dates"));
        levels = inner_join(parts).select(cols);
    }

    std::vector<DailySeries> inputs;
    for (const auto& col : cfg.macro_columns) {
        if (col == kSurpriseDiffColumn) {
            inputs.push_back(diff(market.get("SURPRISE")).renamed(kSurpriseDiffColumn));
        } else {
            inputs.push_back(diff(levels.series(col)));
        }
    }
    const Frame x_all = inner_join(inputs);

    auto with_target = inputs;
    with_target.push_back(d_di5y);
    const Frame window = inner_join(with_target).between(cfg.macro_start, cfg.macro_end);
    if (window.rows() == 0) throw InsufficientDataError("macro window join produced 0 rows");

    MacroBlock block;
    block.model = pls1_fit(window.select(cfg.macro_columns), window.column(kTargetColumn));
    block.factor = macro_factor(block.model, x_all);
    block.window_start = window.dates().front();
    block.window_end = window.dates().back();
    block.focus_dropped_dates = focus.dropped_dates;
    return block;
}

CdsBlock build_cds_block(const MarketDataset& market, const PipelineConfig& cfg) {
    auto window = [&](const DailySeries& s) { return s.between(cfg.sample_start, cfg.sample_end); };
    const auto cds = window(log_return(market.get("CDS")));
    auto [model, parts] = split_cds(cds, window(log_return(market.get("DXY"))), window(log_return(market.get("CRB"))),
                                    window(log_return(market.get("VIX"))), window(diff(market.get("UST10"))));
    CdsBlock block{std::move(model), std::move(parts), {}};
    // CDS return on the split dates, for the component file.
    std::vector<Observation> pts;
    std::size_t k = 0;
    for (const auto& p : block.parts.glob.points()) {
        while (cds[k].date < p.date) ++k;
        pts.push_back(cds[k]);
    }
    block.cds = DailySeries("CDS", std::move(pts));
    return block;
}

DecompositionBlock build_decomposition_block(const DailySeries& d_di5y, const DailySeries& macro,
                                             const DailySeries& cds_dom, const DailySeries& cds_glob,
                                             const PipelineConfig& cfg) {
    auto window = [&](const DailySeries& s) { return s.between(cfg.sample_start, cfg.sample_end); };
    DecompositionBlock d;
    d.joined = in_stage("join", [&] {
        return decomposition_frame(window(d_di5y), window(macro), window(cds_dom), window(cds_glob));
    });
    return in_stage("decompose", [&] {
        d.model = fit_decomposition(d.joined);
        d.contributions = contributions(d.model, d.joined);
        verify_daily_identity(d.contributions);
        d.cumulative = accumulate(d.contributions);
        verify_cumulative_identity(d.cumulative);
        d.std_dev = std_dev_table(d.contributions);
        d.shares = variance_shares(d.contributions);
        return std::move(d);
    });
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

StageResult run_fetch_focus(const PipelineConfig& cfg, const HttpGet& get) {
    OutputDir out(cfg.output_dir);
    LoadReport report;
    const auto panel = in_stage("fetch-focus", [&] { return fetch_focus(cfg.fetch, get, report); });
    HorizonFrame horizons;
    if (!panel.empty()) {
        horizons = reshape_horizons(panel, cfg.fetch.indicators);
        report.dropped += horizons.dropped_dates;
    }
    StageResult r;
    r.stage = "fetch-focus";
    r.report = to_json(report);
    r.report["panel_records"] = panel.size();
    r.report["horizon_rows"] = horizons.frame.rows();
    r.observations = panel.size();
    r.summary = "fetched " + std::to_string(report.fetched) + " records, " + std::to_string(panel.size()) +
                " in panel, " + std::to_string(horizons.frame.rows()) + " complete horizon rows\n";
    out.add(kFocusPanelFile, focus_panel_csv(panel));
    out.add(kFocusLoadReportFile, r.report.dump(2) + "\n");
    r.files = out.commit();
    return r;
}

StageResult run_build_factors(const PipelineConfig& cfg, const HttpGet& get) {
    OutputDir out(cfg.output_dir);
    LoadReport market_load;
    LoadReport focus_load;
    const auto market = load_market(cfg, market_columns_for_macro(cfg), market_load);
    const auto panel = load_focus(cfg, get, focus_load);
    const auto macro = in_stage("build-factors", [&] {
        const auto horizons = reshape_horizons(panel, cfg.fetch.indicators);
        return build_macro_block(market, horizons, cfg);
    });
    focus_load.dropped += macro.focus_dropped_dates;

    StageResult r;
    r.stage = "build-factors";
    r.report = {{"pls", to_json(macro.model)},
                {"window_start", macro.window_start.iso()},
                {"window_end", macro.window_end.iso()},
                {"factor_rows", macro.factor.size()},
                {"load", {{"market", to_json(market_load)}, {"focus", to_json(focus_load)}}}};
    r.observations = macro.model.n_observations;
    r.summary = std::string(kMacroFactorName) + ": " + std::to_string(macro.factor.size()) + " rows, estimated on " +
                macro.window_start.iso() + " to " + macro.window_end.iso() + " (" +
                std::to_string(macro.model.n_observations) + " rows, sign " + std::to_string(macro.model.sign) +
                ")\n";
    out.add(kMacroFactorFile, frame_csv(inner_join({macro.factor})));
    out.add(kPlsModelFile, r.report.dump(2) + "\n");
    r.files = out.commit();
    return r;
}

StageResult run_split_cds(const PipelineConfig& cfg) {
    OutputDir out(cfg.output_dir);
    LoadReport market_load;
    const auto market = load_market(cfg, {"CDS", "DXY", "CRB", "VIX", "UST10"}, market_load);
    const auto cds = in_stage("split-cds", [&] { return build_cds_block(market, cfg); });

    StageResult r;
    r.stage = "split-cds";
    r.report = {{"cds_split", to_json(cds.model)}, {"load", {{"market", to_json(market_load)}}}};
    r.observations = cds.model.fit.n_observations;
    r.summary = "CDS split on " + std::to_string(cds.model.fit.n_observations) + " rows, R2 " +
                format_fixed(cds.model.fit.r_squared, 4) + "\n";
    out.add(kCdsComponentsFile, frame_csv(cds_components_frame(cds)));
    out.add(kCdsModelFile, r.report.dump(2) + "\n");
    r.files = out.commit();
    return r;
}

StageResult run_decompose(const PipelineConfig& cfg) {
    LoadReport market_load;
    const auto market = load_market(cfg, {"DI5Y"}, market_load);
    const auto macro_path = stage_input(cfg.macro_factor_csv, cfg, kMacroFactorFile);
    const auto cds_path = stage_input(cfg.cds_components_csv, cfg, kCdsComponentsFile);
    const auto [macro, comps] = in_stage("load", [&] {
        return std::make_pair(read_frame_csv(macro_path, {kMacroFactorName}),
                              read_frame_csv(cds_path, {kCdsGlobName, kCdsDomName}));
    });
    const auto d_di5y = in_stage("transform", [&] { return to_bps_change(market.get("DI5Y")); });
    const auto d = build_decomposition_block(d_di5y, macro.series(kMacroFactorName), comps.series(kCdsDomName),
                                             comps.series(kCdsGlobName), cfg);

    OutputDir out(cfg.output_dir);
    StageResult r;
    r.stage = "decompose";
    r.report = build_report(d, nullptr, nullptr, market_load, nullptr, cfg);
    r.summary = build_summary(d, cfg);
    r.observations = d.contributions.rows();
    add_decomposition_outputs(out, d, r.report, models_json(nullptr, nullptr, d, cfg));
    r.files = out.commit();
    return r;
}

StageResult run_pipeline(const PipelineConfig& cfg, const HttpGet& get) {
    OutputDir out(cfg.output_dir);
    LoadReport market_load;
    LoadReport focus_load;
    const auto market = load_market(cfg, {kMarketRoster.begin(), kMarketRoster.end()}, market_load);
    const auto panel = load_focus(cfg, get, focus_load);

    const auto macro = in_stage("macro-factor", [&] {
        const auto horizons = reshape_horizons(panel, cfg.fetch.indicators);
        return build_macro_block(market, horizons, cfg);
    });
    focus_load.dropped += macro.focus_dropped_dates;
    const auto cds = in_stage("cds-split", [&] { return build_cds_block(market, cfg); });
    const auto d_di5y = in_stage("transform", [&] { return to_bps_change(market.get("DI5Y")); });
    const auto d = build_decomposition_block(d_di5y, macro.factor, cds.parts.dom, cds.parts.glob, cfg);

    StageResult r;
    r.stage = "run";
    r.report = build_report(d, &macro, &cds, market_load, &focus_load, cfg);
    r.summary = build_summary(d, cfg);
    r.observations = d.contributions.rows();

    out.add(kMacroFactorFile, frame_csv(inner_join({macro.factor})));
    out.add(kCdsComponentsFile, frame_csv(cds_components_frame(cds)));
    add_decomposition_outputs(out, d, r.report, models_json(&macro, &cds, d, cfg));
    r.files = out.commit();
    return r;
}

}  // namespace didecomp
