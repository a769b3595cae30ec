#include "didecomp/errors.hpp"
#include "didecomp/regression.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace didecomp;

TEST(Ols, MatchesNormalEquationOracleOnTenPoints) {
    const oracle::TenPoint d;
    const auto fit = ols_fit(d.y, {d.x1, d.x2}, {"x1", "x2"}, true);
    const auto ref = oracle::ols(d.y, {d.x1, d.x2}, true);
    ASSERT_EQ(fit.coefficients.size(), 3u);
    EXPECT_EQ(fit.names[0], kInterceptName);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(fit.coefficients[i], ref.coef[i], 1e-8);
        EXPECT_NEAR(fit.standard_errors[i], ref.se[i], 1e-8);
        EXPECT_NEAR(fit.t_statistics[i], ref.t[i], 1e-8);
        EXPECT_NEAR(fit.p_values[i], ref.p[i], 1e-8);
    }
    EXPECT_NEAR(fit.r_squared, ref.r2, 1e-10);
    EXPECT_EQ(fit.residual_dof(), 7u);
}

TEST(Ols, WithoutInterceptMatchesOracle) {
    const oracle::TenPoint d;
    const auto fit = ols_fit(d.y, {d.x1, d.x2}, {"x1", "x2"}, false);
    const auto ref = oracle::ols(d.y, {d.x1, d.x2}, false);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(fit.coefficients[i], ref.coef[i], 1e-8);
        EXPECT_NEAR(fit.standard_errors[i], ref.se[i], 1e-8);
        EXPECT_NEAR(fit.p_values[i], ref.p[i], 1e-8);
    }
}

TEST(Ols, NoiselessRecoveryIsExact) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    std::vector<double> a(50), b(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
        a[i] = n01(rng);
        b[i] = n01(rng);
        y[i] = 1.5 - 2.0 * a[i] + 0.25 * b[i];
    }
    const auto fit = ols_fit(y, {a, b}, {"a", "b"}, true);
    EXPECT_NEAR(fit.coefficients[0], 1.5, 1e-9);
    EXPECT_NEAR(fit.coefficients[1], -2.0, 1e-9);
    EXPECT_NEAR(fit.coefficients[2], 0.25, 1e-9);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(Ols, CollinearColumnsNameTheCulprit) {
    const oracle::TenPoint d;
    std::vector<double> twice(d.x1.size());
    for (std::size_t i = 0; i < twice.size(); ++i) twice[i] = 2.0 * d.x1[i];
    try {
        ols_fit(d.y, {d.x1, d.x2, twice}, {"x1", "x2", "x1_twice"}, true);
        FAIL() << "expected SingularDesignError";
    } catch (const SingularDesignError& e) {
        const std::string what = e.what();
        EXPECT_TRUE(what.find("x1") != std::string::npos) << what;
    }
}

TEST(Ols, TooFewObservations) {
    const std::vector<double> y{1, 2, 3};
    EXPECT_THROW(ols_fit(y, {{1, 2, 4}, {3, 1, 2}}, {"a", "b"}, true), InsufficientDataError);
}

TEST(Ols, ScaleEquivariance) {
    const oracle::TenPoint d;
    std::vector<double> x1s(d.x1.size());
    for (std::size_t i = 0; i < x1s.size(); ++i) x1s[i] = 100.0 * d.x1[i];
    const auto a = ols_fit(d.y, {d.x1, d.x2}, {"x1", "x2"}, true);
    const auto b = ols_fit(d.y, {x1s, d.x2}, {"x1", "x2"}, true);
    EXPECT_NEAR(b.coefficients[1] * 100.0, a.coefficients[1], 1e-10);
    EXPECT_NEAR(b.t_statistics[1], a.t_statistics[1], 1e-8);
    EXPECT_NEAR(b.r_squared, a.r_squared, 1e-12);
}

TEST(Ols, RSquaredNeverFallsWhenARegressorIsAdded) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> y(40), a(40), b(40);
        for (std::size_t i = 0; i < 40; ++i) {
            a[i] = n01(rng);
            b[i] = n01(rng);
            y[i] = a[i] + n01(rng);
        }
        const auto small = ols_fit(y, {a}, {"a"}, true);
        const auto big = ols_fit(y, {a, b}, {"a", "b"}, true);
        EXPECT_GE(big.r_squared + 1e-12, small.r_squared);
        EXPECT_LE(big.r_squared, 1.0);
        EXPECT_GE(big.r_squared, 0.0);
    }
}

TEST(StudentT, MatchesQuadratureOracle) {
    for (double dof : {1.0, 2.0, 3.0, 7.0, 30.0, 2737.0}) {
        for (double t : {0.0, 0.2, 1.0, 1.96, 2.5, 4.0, 8.0}) {
            EXPECT_NEAR(student_t_two_sided_p(t, static_cast<std::size_t>(dof)), oracle::t_two_sided_p(t, dof), 1e-10)
                << "t=" << t << " dof=" << dof;
            EXPECT_NEAR(student_t_two_sided_p(-t, static_cast<std::size_t>(dof)),
                        student_t_two_sided_p(t, static_cast<std::size_t>(dof)), 1e-15);
        }
    }
}

TEST(StudentT, ClosedFormsAndEdges) {
    // dof = 1 is Cauchy: p = 1 - 2 atan(|t|) / pi.
    EXPECT_NEAR(student_t_two_sided_p(1.0, 1), 0.5, 1e-14);
    // dof = 2: p = 1 - |t| / sqrt(2 + t^2).
    EXPECT_NEAR(student_t_two_sided_p(3.0, 2), 1.0 - 3.0 / std::sqrt(11.0), 1e-14);
    EXPECT_EQ(student_t_two_sided_p(0.0, 5), 1.0);
    EXPECT_EQ(student_t_two_sided_p(INFINITY, 5), 0.0);
    EXPECT_THROW(student_t_two_sided_p(1.0, 0), DomainError);
    EXPECT_THROW(student_t_two_sided_p(NAN, 4), DomainError);
}

TEST(IncompleteBeta, SymmetryAndEndpoints) {
    for (double x : {0.1, 0.3, 0.5, 0.9}) {
        EXPECT_NEAR(regularized_incomplete_beta(2.5, 0.5, x) + regularized_incomplete_beta(0.5, 2.5, 1.0 - x), 1.0,
                    1e-13);
    }
    EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
    EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
    // I_x(1, b) = 1 - (1 - x)^b
    EXPECT_NEAR(regularized_incomplete_beta(1.0, 4.0, 0.2), 1.0 - std::pow(0.8, 4.0), 1e-14);
}
