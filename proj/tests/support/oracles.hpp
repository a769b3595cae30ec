#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library's numerics: least squares goes through explicit normal equations
// in long double, Student-t tails through numerical quadrature of the density.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;

/// Gauss-Jordan inverse with partial pivoting.
inline Matrix invert(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        }
        if (a[piv][c] == 0.0L) throw std::runtime_error("singular");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        const long double d = a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

/// Adaptive Simpson on [a, b].
template <typename F>
long double simpson(F&& f, long double a, long double b, long double fa, long double fm, long double fb,
                    long double whole, long double tol, int depth) {
    const long double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
    const long double flm = f(lm), frm = f(rm);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
long double integrate(F&& f, long double a, long double b, long double tol = 1e-15L) {
    const long double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 60);
}

/// Two-sided p-value P(|T| > |t|) from the Student-t density, integrated
/// over [0, |t|] in unit-width pieces.
inline double t_two_sided_p(double t, double dof) {
    const long double nu = dof;
    const long double logc = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5L * std::log(nu * 3.14159265358979323846264338327950288L);
    auto pdf = [&](long double x) { return std::exp(logc - (nu + 1) / 2 * std::log1p(x * x / nu)); };
    const long double T = std::fabs(t);
    long double mass = 0.0L;
    for (long double a = 0.0L; a < T; a += 1.0L) mass += integrate(pdf, a, std::min(a + 1.0L, T));
    return static_cast<double>(1.0L - 2.0L * mass);
}

struct OlsResult {
    std::vector<double> coef, se, t, p;
    double r2 = 0.0;
};

/// Explicit normal equations; columns exclude the constant.
inline OlsResult ols(const std::vector<double>& y, const std::vector<std::vector<double>>& cols, bool intercept) {
    const std::size_t n = y.size();
    std::vector<std::vector<long double>> z;
    if (intercept) z.emplace_back(n, 1.0L);
    for (const auto& c : cols) z.emplace_back(c.begin(), c.end());
    const std::size_t k = z.size();
    Matrix xtx(k, std::vector<long double>(k, 0.0L));
    std::vector<long double> xty(k, 0.0L);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            for (std::size_t i = 0; i < n; ++i) xtx[a][b] += z[a][i] * z[b][i];
        }
        for (std::size_t i = 0; i < n; ++i) xty[a] += z[a][i] * y[i];
    }
    const Matrix inv = invert(xtx);
    std::vector<long double> beta(k, 0.0L);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) beta[a] += inv[a][b] * xty[b];
    }
    long double rss = 0.0L, ybar = 0.0L, tss = 0.0L;
    for (double v : y) ybar += v;
    ybar /= n;
    for (std::size_t i = 0; i < n; ++i) {
        long double fit = 0.0L;
        for (std::size_t a = 0; a < k; ++a) fit += beta[a] * z[a][i];
        rss += (y[i] - fit) * (y[i] - fit);
        tss += (y[i] - ybar) * (y[i] - ybar);
    }
    const long double s2 = rss / static_cast<long double>(n - k);
    OlsResult r;
    for (std::size_t a = 0; a < k; ++a) {
        const long double se = std::sqrt(s2 * inv[a][a]);
        r.coef.push_back(static_cast<double>(beta[a]));
        r.se.push_back(static_cast<double>(se));
        r.t.push_back(static_cast<double>(beta[a] / se));
        r.p.push_back(t_two_sided_p(static_cast<double>(beta[a] / se), static_cast<double>(n - k)));
    }
    r.r2 = static_cast<double>(1.0L - rss / tss);
    return r;
}

/// Largest |c . w| over `draws` random unit vectors w.
inline double best_random_projection(const std::vector<double>& c, std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::vector<double> w(c.size());
    double best = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        double norm = 0.0;
        for (auto& v : w) {
            v = n01(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        double dot = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) dot += c[j] * w[j] / norm;
        best = std::max(best, std::fabs(dot));
    }
    return best;
}

/// The fixed 10-point dataset: y on two regressors with an intercept.
struct TenPoint {
    std::vector<double> y{3.1, 4.9, 7.2, 8.8, 11.3, 12.9, 15.2, 16.8, 19.1, 21.4};
    std::vector<double> x1{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> x2{2.5, 1.0, 3.7, 0.2, 4.4, 2.9, 1.8, 3.3, 0.7, 2.2};
};

}  // namespace oracle
