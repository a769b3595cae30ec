#pragma once

#include "didecomp/series.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace didecomp {

inline constexpr const char* kMacroFactorName = "Macro_Factor_PLS";

/// One-component supervised PLS model for the Macro/Central-Bank factor.
///
/// Applying the model to a frame X:
///   z      = (X - input.mean) / input.std      (column-wise)
///   raw    = sign * z . weights
///   factor = (raw - factor_mean) / factor_std
struct PlsModel {
    std::vector<std::string> columns;
    std::vector<double> weights;  ///< unit L2 norm
    StandardizationParams input;
    int sign = 1;
    double factor_mean = 0.0;
    double factor_std = 1.0;
    std::size_t n_observations = 0;
};

/// Fits the single PLS component: w is the unit vector maximizing the sample
/// covariance of X_std * w with y, i.e. X_std' (y - mean(y)) normalized.
/// The score is then sign-anchored against y and standardized.
///
/// Throws DegenerateError for a constant y or a zero-variance X column, and
/// InsufficientDataError for fewer than 3 rows.
PlsModel pls1_fit(const Frame& X, std::span<const double> y);

/// Flips f when Corr(f, y) < 0. Returns the anchored factor and the sign
/// applied (+1 or -1); an exactly zero correlation is not flipped.
std::pair<std::vector<double>, int> anchor_sign(std::span<const double> f, std::span<const double> y);

/// Scores a frame with the fitted model. Columns must match the model's
/// names and order (SchemaError otherwise).
DailySeries macro_factor(const PlsModel& model, const Frame& X);

}  // namespace didecomp
