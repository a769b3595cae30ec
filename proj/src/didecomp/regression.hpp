#pragma once

#include "didecomp/series.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace didecomp {

/// Result of one ordinary least squares estimation with classical
/// (homoskedastic) inference. Coefficient vectors are ordered like `names`,
/// with the intercept first when one was requested.
struct OlsFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> t_statistics;
    std::vector<double> p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double residual_std_error = 0.0;
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::size_t n_observations = 0;
    std::size_t n_regressors = 0;  ///< excluding the intercept
    bool intercept = false;

    [[nodiscard]] std::size_t residual_dof() const noexcept {
        return n_observations - n_regressors - (intercept ? 1 : 0);
    }
    /// Index of a coefficient by name; throws SchemaError if absent.
    [[nodiscard]] std::size_t index_of(const std::string& name) const;
};

inline constexpr const char* kInterceptName = "const";

/// Pivot threshold of the rank test, relative to the largest pivot of R.
inline constexpr double kRankTolerance = 1e-10;

/// Least squares of y on the columns of X (plus an intercept if requested),
/// solved by column-pivoted Householder QR.
///
/// Throws InsufficientDataError when rows <= coefficients and
/// SingularDesignError (naming the dependent columns) when the design is
/// rank deficient at kRankTolerance.
OlsFit ols_fit(std::span<const double> y, const Frame& X, bool intercept);

/// Same as above for bare columns; `names` labels the columns.
OlsFit ols_fit(std::span<const double> y, const std::vector<std::vector<double>>& columns,
               const std::vector<std::string>& names, bool intercept);

/// 2 * P(T >= |t|) for T ~ Student-t(dof). Infinite |t| gives 0.
/// Throws DomainError for dof == 0 or NaN t.
double student_t_two_sided_p(double t, std::size_t dof);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
/// `one_minus_x` lets callers pass 1 - x without cancellation.
double regularized_incomplete_beta(double a, double b, double x, double one_minus_x);
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace didecomp
