#pragma once

#include "didecomp/cds_split.hpp"
#include "didecomp/decomposition.hpp"
#include "didecomp/ingestion.hpp"
#include "didecomp/pls.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace didecomp {

using Json = nlohmann::ordered_json;

// Model files. Doubles are written at full (round-trip) precision.
Json to_json(const PlsModel& model);
PlsModel pls_model_from_json(const Json& j);
Json to_json(const CdsSplitModel& model);
Json to_json(const OlsFit& fit, const SignificanceThresholds& thresholds);
Json to_json(const DecompositionModel& model, const SignificanceThresholds& thresholds);
Json to_json(const LoadReport& report);
Json to_json(const StdDevTable& table);
Json to_json(const VarianceShares& shares);

/// Header: date,d_di5y_bps,const_bps,macro_bps,riscobr_bps,global_bps,residual_bps
/// (4 decimals).
std::string contributions_csv(const ContributionFrame& c);
/// Header: date,di5y_change_cum,const_cum,macro_cum,riscobr_cum,global_cum,residual_cum
/// (4 decimals).
std::string cumulative_csv(const CumulativeFrame& c);

/// `date,<column...>` with shortest round-trip values; used for the factor
/// files that later stages read back.
std::string frame_csv(const Frame& f);
/// Reads a frame_csv file, keeping `columns` in that order. Any malformed
/// row is a ParseError.
Frame read_frame_csv(const std::filesystem::path& path, const std::vector<std::string>& columns);

inline constexpr std::array<const char*, 6> kCumulativeSeries = {
    "di5y_change_cum", "const_cum", "macro_cum", "riscobr_cum", "global_cum", "residual_cum"};

/// Standalone SVG line chart of the six cumulative paths with a legend and a
/// date axis. Needs at least 2 rows; checks the cumulative identity on the
/// last row before drawing.
std::string render_svg(const CumulativeFrame& c);
void emit_svg(const CumulativeFrame& c, const std::filesystem::path& path);

}  // namespace didecomp
