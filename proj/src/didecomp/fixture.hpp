#pragma once

#include "didecomp/report.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace didecomp {

/// Defaults give a problem shaped like the published sample: daily std devs of about 15.06
/// (DI5Y change), 6.52 (domestic), 2.87 (global), 0.77 (macro) bps.
struct FixtureParams {
    std::uint64_t seed = 1;
    std::size_t n = 2741;  ///< rows in the decomposition sample
    /// beta_0, beta_M, beta_D, beta_G
    std::array<double, 4> betas{0.051434, 0.635428, 339.045202, 325.577999};
    double r2 = 0.2245;

    // Construction targets on the decomposition sample.
    double macro_std = 1.2168;    ///< std of the standardized macro factor after the sample start
    double dom_std = 0.01922;     ///< std of the domestic CDS component (log-return)
    double glob_std = 0.00881;    ///< std of the global CDS component net of the intercept
    double cds_alpha = 1e-4;
};

inline constexpr const char* kFixtureMarketFile = "market.csv";
inline constexpr const char* kFixtureFocusFile = "focus_panel.csv";
inline constexpr const char* kFixtureFactorsFile = "factors_truth.csv";
inline constexpr const char* kFixtureTruthFile = "truth.json";
inline constexpr const char* kFixtureConfigFile = "config.ini";

struct FixtureResult {
    Json truth;
    std::vector<std::filesystem::path> files;
};

/// Writes a synthetic market CSV, a long-format Focus panel, the true factor
/// series, a ground-truth sidecar (generating betas, noise scale, analytic
/// standard errors) and a config that runs the pipeline on them. Same
/// parameters give identical files. Throws ConfigError for n < 100 or r2
/// outside (0, 1).
FixtureResult generate_fixture(const FixtureParams& params, const std::filesystem::path& out_dir);

}  // namespace didecomp
