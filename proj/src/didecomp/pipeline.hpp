#pragma once

#include "didecomp/cds_split.hpp"
#include "didecomp/config.hpp"
#include "didecomp/decomposition.hpp"
#include "didecomp/ingestion.hpp"
#include "didecomp/pls.hpp"
#include "didecomp/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace didecomp {

inline constexpr const char* kSoftwareName = "di-decomp";
inline constexpr const char* kSoftwareVersion = "1.0.0";

// Output file names.
inline constexpr const char* kFocusPanelFile = "focus_panel.csv";
inline constexpr const char* kFocusLoadReportFile = "focus_load_report.json";
inline constexpr const char* kMacroFactorFile = "macro_factor.csv";
inline constexpr const char* kPlsModelFile = "pls_model.json";
inline constexpr const char* kCdsComponentsFile = "cds_components.csv";
inline constexpr const char* kCdsModelFile = "cds_model.json";
inline constexpr const char* kContributionsFile = "contributions.csv";
inline constexpr const char* kCumulativeFile = "cumulative.csv";
inline constexpr const char* kModelsFile = "models.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kSvgFile = "decomposition.svg";

/// Supervised macro factor and the inputs it was estimated on.
struct MacroBlock {
    PlsModel model;
    DailySeries factor;  ///< scored on every date with complete inputs
    TradingDate window_start{2000, 1, 1};
    TradingDate window_end{2000, 1, 1};
    std::size_t focus_dropped_dates = 0;
};

struct CdsBlock {
    CdsSplitModel model;
    CdsComponents parts;
    DailySeries cds;  ///< the CDS log-return on the split dates
};

struct DecompositionBlock {
    Frame joined;
    DecompositionModel model;
    ContributionFrame contributions;
    CumulativeFrame cumulative;
    StdDevTable std_dev;
    VarianceShares shares;
};

/// Transforms and PLS fit: DI5Y -> bps change, Focus horizons and SURPRISE ->
/// diffs, one-component PLS on the macro window.
MacroBlock build_macro_block(const MarketDataset& market, const HorizonFrame& focus, const PipelineConfig& cfg);

/// CDS, DXY, CRB, VIX -> log-returns, UST10 -> diff, restricted to the sample
/// window, then the global/domestic split.
CdsBlock build_cds_block(const MarketDataset& market, const PipelineConfig& cfg);

/// Final regression, daily contributions, cumulative accounting, volatility
/// table and variance shares on the sample window. Identities are verified.
DecompositionBlock build_decomposition_block(const DailySeries& d_di5y, const DailySeries& macro,
                                             const DailySeries& cds_dom, const DailySeries& cds_glob,
                                             const PipelineConfig& cfg);

/// Outcome of one CLI stage: what was written and the JSON/text reports.
struct StageResult {
    std::string stage;
    Json report;
    std::string summary;
    std::vector<std::filesystem::path> files;
    std::size_t observations = 0;
};

StageResult run_fetch_focus(const PipelineConfig& cfg, const HttpGet& get);
StageResult run_build_factors(const PipelineConfig& cfg, const HttpGet& get);
StageResult run_split_cds(const PipelineConfig& cfg);
/// Reads macro_factor.csv and cds_components.csv (data.* paths or the output
/// directory) and produces the decomposition outputs.
StageResult run_decompose(const PipelineConfig& cfg);

/// Full procedure: load -> transforms -> PLS factor -> CDS split ->
/// decomposition -> accumulation -> emission. Byte-identical outputs for
/// identical inputs and config. Nothing is left behind on failure.
StageResult run_pipeline(const PipelineConfig& cfg, const HttpGet& get);

}  // namespace didecomp
