#include "didecomp/pls.hpp"

#include "didecomp/errors.hpp"

#include <cmath>

namespace didecomp {

namespace {

std::vector<double> project(const Frame& z, std::span<const double> w, int sign) {
    std::vector<double> out(z.rows(), 0.0);
    for (std::size_t j = 0; j < z.cols(); ++j) {
        auto col = z.column(j);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += col[i] * w[j];
    }
    if (sign < 0) {
        for (double& v : out) v = -v;
    }
    return out;
}

}  // namespace

std::pair<std::vector<double>, int> anchor_sign(std::span<const double> f, std::span<const double> y) {
    if (f.size() != y.size()) throw SchemaError("anchor_sign: factor and target lengths differ");
    if (f.size() < 2) throw InsufficientDataError("anchor_sign needs at least 2 points");
    auto corr = correlation(f, y);
    if (!corr) throw DegenerateError("anchor_sign: factor or target is constant");
    std::vector<double> out(f.begin(), f.end());
    if (*corr < 0.0) {
        for (double& v : out) v = -v;
        return {std::move(out), -1};
    }
    return {std::move(out), 1};
}

PlsModel pls1_fit(const Frame& X, std::span<const double> y) {
    if (X.rows() != y.size()) {
        throw SchemaError("pls1_fit: X has " + std::to_string(X.rows()) + " rows, y has " + std::to_string(y.size()));
    }
    if (X.rows() < 3) throw InsufficientDataError("pls1_fit needs at least 3 rows, got " + std::to_string(X.rows()));
    if (X.cols() == 0) throw SchemaError("pls1_fit: no input columns");
    if (!(sample_std(y) > 0.0)) throw DegenerateError("pls1_fit: target is constant");

    auto [z, params] = standardize(X);

    const double ybar = mean(y);
    std::vector<double> w(z.cols(), 0.0);
    for (std::size_t j = 0; j < z.cols(); ++j) {
        auto col = z.column(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) acc += col[i] * (y[i] - ybar);
        w[j] = acc;
    }
    double norm = 0.0;
    for (double v : w) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw DegenerateError("pls1_fit: target is uncorrelated with every input column");
    for (double& v : w) v /= norm;

    auto raw = project(z, w, 1);
    auto [anchored, sign] = anchor_sign(raw, y);

    PlsModel model;
    model.columns = X.names();
    model.weights = std::move(w);
    model.input = std::move(params);
    model.sign = sign;
    model.factor_mean = mean(anchored);
    model.factor_std = sample_std(anchored);
    model.n_observations = X.rows();
    if (!(model.factor_std > 0.0)) throw DegenerateError("pls1_fit: factor has zero variance");
    return model;
}

DailySeries macro_factor(const PlsModel& model, const Frame& X) {
    if (X.names() != model.columns) {
        std::string expected;
        for (const auto& c : model.columns) expected += (expected.empty() ? "" : ",") + c;
        throw SchemaError("macro_factor: frame columns do not match the model (expected " + expected + ")");
    }
    std::vector<std::vector<double>> zcols;
    zcols.reserve(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        auto col = X.column(j);
        std::vector<double> z(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) z[i] = (col[i] - model.input.mean[j]) / model.input.std[j];
        zcols.push_back(std::move(z));
    }
    const Frame z(X.dates(), X.names(), std::move(zcols));
    auto f = project(z, model.weights, model.sign);
    for (double& v : f) v = (v - model.factor_mean) / model.factor_std;
    return DailySeries(kMacroFactorName, X.dates(), std::move(f));
}

}  // namespace didecomp
