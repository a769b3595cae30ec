#pragma once

#include "didecomp/regression.hpp"
#include "didecomp/series.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace didecomp {

// Column names of the joined decomposition sample.
inline constexpr const char* kTargetColumn = "d_di5y";
inline constexpr const char* kMacroColumn = "macro";
inline constexpr const char* kDomColumn = "cds_dom";
inline constexpr const char* kGlobColumn = "cds_glob";

/// p-value cut-offs for the coefficient labels. Labels:
/// p < highly -> "Highly Significant", p < significant -> "Significant",
/// p >= weak -> "Not significant", otherwise "Weak".
struct SignificanceThresholds {
    double highly = 0.001;
    double significant = 0.01;
    double weak = 0.05;

    [[nodiscard]] std::string label(double p) const;
};

struct DecompositionModel {
    double beta0 = 0.0;      ///< bps per day
    double beta_macro = 0.0; ///< bps per factor unit
    double beta_dom = 0.0;
    double beta_glob = 0.0;
    OlsFit fit;
};

/// Daily bps contributions. Per row:
///   d_di5y = constant + macro + riscobr + global + residual
struct ContributionFrame {
    std::vector<TradingDate> dates;
    std::vector<double> d_di5y;
    std::vector<double> constant;
    std::vector<double> macro;
    std::vector<double> riscobr;
    std::vector<double> global;
    std::vector<double> residual;

    [[nodiscard]] std::size_t rows() const noexcept { return dates.size(); }
    /// constant + macro + riscobr + global (the fitted value) per row.
    [[nodiscard]] std::vector<double> fitted() const;
};

/// Running sums of every ContributionFrame column from the first row.
struct CumulativeFrame {
    std::vector<TradingDate> dates;
    std::vector<double> di5y_change_cum;
    std::vector<double> const_cum;
    std::vector<double> macro_cum;
    std::vector<double> riscobr_cum;
    std::vector<double> global_cum;
    std::vector<double> residual_cum;

    [[nodiscard]] std::size_t rows() const noexcept { return dates.size(); }
};

/// Daily standard deviations (bps, n - 1 denominator).
struct StdDevTable {
    double d_di5y = 0.0;
    double macro = 0.0;
    double riscobr = 0.0;
    double global = 0.0;
    double residual = 0.0;
    double fitted = 0.0;
};

inline constexpr std::array<const char*, 3> kContributionNames = {"Macro", "RiscoBR", "Global"};

/// Orthogonal approximation of the explained-variance split across the three
/// factor contributions, plus their correlations so the approximation can be
/// judged. Correlations involving a zero-variance column are nullopt.
struct VarianceShares {
    std::array<double, 3> share{};  ///< Macro, RiscoBR, Global
    std::array<std::array<std::optional<double>, 3>, 3> correlation{};
};

/// Inner join of the four inputs into the columns d_di5y, macro, cds_dom,
/// cds_glob. An empty join is an InsufficientDataError listing each input's
/// date range.
Frame decomposition_frame(const DailySeries& d_di5y, const DailySeries& macro, const DailySeries& cds_dom,
                          const DailySeries& cds_glob);

DecompositionModel fit_decomposition(const Frame& joined);
DecompositionModel fit_decomposition(const DailySeries& d_di5y, const DailySeries& macro,
                                     const DailySeries& cds_dom, const DailySeries& cds_glob);

ContributionFrame contributions(const DecompositionModel& model, const Frame& joined);

CumulativeFrame accumulate(const ContributionFrame& c);

StdDevTable std_dev_table(const ContributionFrame& c);

VarianceShares variance_shares(const ContributionFrame& c);

/// True when the components add up to `total` within `tol`.
bool row_sum_matches(std::span<const double> components, double total, double tol);

/// Checks the daily identity on every row; throws NumericalError naming the
/// first offending date.
void verify_daily_identity(const ContributionFrame& c, double tol = 1e-9);
/// Checks di5y_change_cum = sum of the five component cumulatives on every row.
void verify_cumulative_identity(const CumulativeFrame& c, double tol = 1e-6);

}  // namespace didecomp
