#include "didecomp/errors.hpp"
#include "didecomp/pls.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace didecomp;

namespace {

struct Instance {
    Frame x;
    std::vector<double> y;
};

Instance random_instance(std::uint64_t seed, std::size_t n = 150, std::size_t p = 6) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    std::vector<TradingDate> d;
    TradingDate t(2010, 1, 4);
    for (std::size_t i = 0; i < n; ++i, t = t.next_weekday()) d.push_back(t);
    std::vector<double> latent(n);
    for (auto& v : latent) v = n01(rng);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) {
        const double load = n01(rng), s = scale(rng), shift = 10.0 * n01(rng);
        for (std::size_t i = 0; i < n; ++i) cols[j][i] = shift + s * (load * latent[i] + n01(rng));
        names.push_back("x" + std::to_string(j));
    }
    std::vector<double> y(n);
    const double b = n01(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = 3.0 + b * latent[i] + n01(rng);
    return {Frame(d, names, cols), y};
}

/// X_std' (y - ybar), computed here from scratch.
std::vector<double> covariance_direction(const Frame& x, const std::vector<double>& y) {
    const std::size_t n = y.size();
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(n);
    std::vector<double> c(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto col = x.column(j);
        double m = 0.0, ss = 0.0;
        for (double v : col) m += v;
        m /= static_cast<double>(n);
        for (double v : col) ss += (v - m) * (v - m);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        for (std::size_t i = 0; i < n; ++i) c[j] += (col[i] - m) / sd * (y[i] - ybar);
    }
    return c;
}

std::vector<double> normalized(std::vector<double> v) {
    double norm = 0.0;
    for (double a : v) norm += a * a;
    norm = std::sqrt(norm);
    for (auto& a : v) a /= norm;
    return v;
}

}  // namespace

TEST(Pls, WeightsAreNormalizedCovarianceDirection) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = random_instance(seed);
        const auto model = pls1_fit(inst.x, inst.y);
        const auto w = normalized(covariance_direction(inst.x, inst.y));
        ASSERT_EQ(model.weights.size(), w.size());
        for (std::size_t j = 0; j < w.size(); ++j) EXPECT_NEAR(model.weights[j], w[j], 1e-10) << "seed " << seed;
    }
}

TEST(Pls, BeatsRandomDirections) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = random_instance(seed);
        const auto model = pls1_fit(inst.x, inst.y);
        const auto c = covariance_direction(inst.x, inst.y);
        double fitted = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) fitted += c[j] * model.weights[j];
        EXPECT_GE(std::fabs(fitted) + 1e-9, oracle::best_random_projection(c, 100000, 1000 + seed));
    }
}

TEST(Pls, FactorIsStandardizedAndPositivelyAnchored) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = random_instance(seed);
        const auto model = pls1_fit(inst.x, inst.y);
        const auto f = macro_factor(model, inst.x).values();
        EXPECT_NEAR(mean(f), 0.0, 1e-10);
        EXPECT_NEAR(sample_std(f), 1.0, 1e-10);
        EXPECT_GE(*correlation(f, inst.y), 0.0);
    }
}

TEST(Pls, NegatingTargetNegatesFactor) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = random_instance(seed);
        std::vector<double> neg(inst.y.size());
        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -inst.y[i];
        const auto f = macro_factor(pls1_fit(inst.x, inst.y), inst.x).values();
        const auto g = macro_factor(pls1_fit(inst.x, neg), inst.x).values();
        for (std::size_t i = 0; i < f.size(); ++i) ASSERT_NEAR(g[i], -f[i], 1e-10);
    }
}

TEST(Pls, AppliesStoredParametersToNewRows) {
    const auto inst = random_instance(4);
    const auto model = pls1_fit(inst.x, inst.y);
    const auto head = inst.x.between(std::nullopt, inst.x.dates()[49]);
    const auto full = macro_factor(model, inst.x);
    const auto part = macro_factor(model, head);
    ASSERT_EQ(part.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(part[i].value, full[i].value);
}

TEST(Pls, ColumnMismatchIsASchemaError) {
    const auto inst = random_instance(2);
    const auto model = pls1_fit(inst.x, inst.y);
    auto names = inst.x.names();
    std::swap(names[0], names[1]);
    EXPECT_THROW(macro_factor(model, inst.x.select(names)), SchemaError);
}

TEST(Pls, DegenerateInputs) {
    const auto inst = random_instance(3);
    std::vector<double> flat(inst.y.size(), 1.0);
    EXPECT_THROW(pls1_fit(inst.x, flat), DegenerateError);
    const auto tiny = inst.x.between(std::nullopt, inst.x.dates()[1]);
    EXPECT_THROW(pls1_fit(tiny, std::span<const double>(inst.y).first(2)), InsufficientDataError);
}

TEST(AnchorSign, FlipsOnlyOnNegativeCorrelation) {
    const std::vector<double> y{1, 2, 3, 4};
    const std::vector<double> f{4, 3, 2, 1};
    const auto [g, s] = anchor_sign(f, y);
    EXPECT_EQ(s, -1);
    EXPECT_EQ(g[0], -4.0);
    const std::vector<double> orth{1, -1, -1, 1};
    EXPECT_EQ(anchor_sign(orth, y).second, 1);
    const std::vector<double> flat{2, 2, 2, 2};
    EXPECT_THROW(anchor_sign(flat, y), DegenerateError);
}
