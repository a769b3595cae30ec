#include "didecomp/regression.hpp"

#include "didecomp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace didecomp {

namespace {

// Continued fraction for I_x(a, b), valid (fast) for x < (a + 1) / (a + b + 2).
double incomplete_beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x, double one_minus_x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a > 0 and b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs 0 <= x <= 1");
    if (x == 0.0) return 0.0;
    if (one_minus_x == 0.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log(one_minus_x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::clamp(front * incomplete_beta_cf(a, b, x) / a, 0.0, 1.0);
    }
    return std::clamp(1.0 - front * incomplete_beta_cf(b, a, one_minus_x) / b, 0.0, 1.0);
}

double regularized_incomplete_beta(double a, double b, double x) {
    return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, std::size_t dof) {
    if (dof == 0) throw DomainError("student t p-value needs dof >= 1");
    if (std::isnan(t)) throw DomainError("student t p-value of NaN");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double nu = static_cast<double>(dof);
    const double t2 = t * t;
    // 2 P(T >= |t|) = I_{nu / (nu + t^2)}(nu / 2, 1 / 2)
    const double x = nu / (nu + t2);
    const double one_minus_x = t2 / (nu + t2);
    return regularized_incomplete_beta(0.5 * nu, 0.5, x, one_minus_x);
}

std::size_t OlsFit::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw SchemaError("fit has no coefficient '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

OlsFit ols_fit(std::span<const double> y, const std::vector<std::vector<double>>& columns,
               const std::vector<std::string>& names, bool intercept) {
    if (columns.size() != names.size()) throw SchemaError("ols_fit: column/name count mismatch");
    const std::size_t n = y.size();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != n) {
            throw SchemaError("ols_fit: column '" + names[j] + "' has " + std::to_string(columns[j].size()) +
                              " rows, y has " + std::to_string(n));
        }
    }
    const std::size_t k = columns.size() + (intercept ? 1 : 0);
    if (k == 0) throw SchemaError("ols_fit: no regressors and no intercept");
    if (n <= k) {
        throw InsufficientDataError("ols_fit: " + std::to_string(n) + " rows for " + std::to_string(k) +
                                    " coefficients (need rows > coefficients)");
    }

    OlsFit fit;
    fit.intercept = intercept;
    fit.n_observations = n;
    fit.n_regressors = columns.size();
    if (intercept) fit.names.emplace_back(kInterceptName);
    fit.names.insert(fit.names.end(), names.begin(), names.end());

    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd A(rows, cols);
    Eigen::Index c0 = 0;
    if (intercept) {
        A.col(0).setOnes();
        c0 = 1;
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
        A.col(c0 + static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(columns[j].data(), rows);
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), rows);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < cols) {
        const auto& perm = qr.colsPermutation().indices();
        std::string dependent;
        for (Eigen::Index p = qr.rank(); p < cols; ++p) {
            if (!dependent.empty()) dependent += ", ";
            dependent += "'" + fit.names[static_cast<std::size_t>(perm(p))] + "'";
        }
        throw SingularDesignError("ols_fit: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                  " of " + std::to_string(cols) + "); linearly dependent: " + dependent);
    }

    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd fitted = A * beta;
    Eigen::VectorXd resid(rows);
    for (Eigen::Index i = 0; i < rows; ++i) resid(i) = yv(i) - fitted(i);

    // (A'A)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(cols, cols).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(cols, cols));
    const Eigen::MatrixXd cov_perm = Rinv * Rinv.transpose();
    const Eigen::MatrixXd xtx_inv = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

    const std::size_t dof = n - k;
    const double ssr = resid.squaredNorm();
    const double sigma2 = ssr / static_cast<double>(dof);
    fit.residual_std_error = std::sqrt(sigma2);

    fit.coefficients.resize(k);
    fit.standard_errors.resize(k);
    fit.t_statistics.resize(k);
    fit.p_values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double b = beta(jj);
        const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(jj, jj)));
        double t = 0.0;
        if (se > 0.0) {
            t = b / se;
        } else if (b != 0.0) {
            t = std::copysign(std::numeric_limits<double>::infinity(), b);
        }
        fit.coefficients[j] = b;
        fit.standard_errors[j] = se;
        fit.t_statistics[j] = t;
        fit.p_values[j] = student_t_two_sided_p(t, dof);
    }

    double tss = 0.0;
    if (intercept) {
        const double ybar = yv.mean();
        for (Eigen::Index i = 0; i < rows; ++i) tss += (yv(i) - ybar) * (yv(i) - ybar);
    } else {
        tss = yv.squaredNorm();
    }
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - ssr / tss, 0.0, 1.0) : 0.0;
    const double denom_total = static_cast<double>(intercept ? n - 1 : n);
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * denom_total / static_cast<double>(dof);

    fit.fitted.assign(fitted.data(), fitted.data() + rows);
    fit.residuals.assign(resid.data(), resid.data() + rows);
    return fit;
}

OlsFit ols_fit(std::span<const double> y, const Frame& X, bool intercept) {
    if (y.size() != X.rows()) {
        throw SchemaError("ols_fit: y has " + std::to_string(y.size()) + " rows, design has " +
                          std::to_string(X.rows()));
    }
    return ols_fit(y, X.columns(), X.names(), intercept);
}

}  // namespace didecomp
