#include "didecomp/decomposition.hpp"

#include "didecomp/errors.hpp"

#include <cmath>

namespace didecomp {

std::string SignificanceThresholds::label(double p) const {
    if (p < highly) return "Highly Significant";
    if (p < significant) return "Significant";
    if (p >= weak) return "Not significant";
    return "Weak";
}

std::vector<double> ContributionFrame::fitted() const {
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = constant[i] + macro[i] + riscobr[i] + global[i];
    return out;
}

Frame decomposition_frame(const DailySeries& d_di5y, const DailySeries& macro, const DailySeries& cds_dom,
                          const DailySeries& cds_glob) {
    const std::vector<DailySeries> inputs = {d_di5y.renamed(kTargetColumn), macro.renamed(kMacroColumn),
                                             cds_dom.renamed(kDomColumn), cds_glob.renamed(kGlobColumn)};
    Frame joined = inner_join(inputs);
    if (joined.rows() == 0) {
        std::string ranges;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const auto& s = inputs[k];
            ranges += (k ? "; " : "") + s.name() + ": ";
            ranges += s.empty() ? std::string("empty")
                                : s[0].date.iso() + ".." + s[s.size() - 1].date.iso() + " (" +
                                      std::to_string(s.size()) + " rows)";
        }
        throw InsufficientDataError("join produced 0 rows [" + ranges + "]");
    }
    return joined;
}

DecompositionModel fit_decomposition(const Frame& joined) {
    const Frame design = joined.select({kMacroColumn, kDomColumn, kGlobColumn});
    DecompositionModel model;
    model.fit = ols_fit(joined.column(kTargetColumn), design, true);
    model.beta0 = model.fit.coefficients[0];
    model.beta_macro = model.fit.coefficients[1];
    model.beta_dom = model.fit.coefficients[2];
    model.beta_glob = model.fit.coefficients[3];
    return model;
}

DecompositionModel fit_decomposition(const DailySeries& d_di5y, const DailySeries& macro,
                                     const DailySeries& cds_dom, const DailySeries& cds_glob) {
    return fit_decomposition(decomposition_frame(d_di5y, macro, cds_dom, cds_glob));
}

ContributionFrame contributions(const DecompositionModel& model, const Frame& joined) {
    const auto y = joined.column(kTargetColumn);
    const auto m = joined.column(kMacroColumn);
    const auto d = joined.column(kDomColumn);
    const auto g = joined.column(kGlobColumn);

    ContributionFrame c;
    c.dates = joined.dates();
    const std::size_t n = joined.rows();
    c.d_di5y.assign(y.begin(), y.end());
    c.constant.assign(n, model.beta0);
    c.macro.resize(n);
    c.riscobr.resize(n);
    c.global.resize(n);
    c.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.macro[i] = model.beta_macro * m[i];
        c.riscobr[i] = model.beta_dom * d[i];
        c.global[i] = model.beta_glob * g[i];
        c.residual[i] = y[i] - (model.beta0 + c.macro[i] + c.riscobr[i] + c.global[i]);
    }
    return c;
}

CumulativeFrame accumulate(const ContributionFrame& c) {
    if (c.rows() == 0) throw InsufficientDataError("accumulate: empty contribution frame");
    const std::size_t n = c.rows();
    CumulativeFrame out;
    out.dates = c.dates;
    auto running = [n](const std::vector<double>& x) {
        std::vector<double> s(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += x[i];
            s[i] = acc;
        }
        return s;
    };
    out.di5y_change_cum = running(c.d_di5y);
    out.const_cum = running(c.constant);
    out.macro_cum = running(c.macro);
    out.riscobr_cum = running(c.riscobr);
    out.global_cum = running(c.global);
    out.residual_cum = running(c.residual);
    return out;
}

StdDevTable std_dev_table(const ContributionFrame& c) {
    if (c.rows() < 2) throw InsufficientDataError("std_dev_table needs at least 2 rows");
    StdDevTable t;
    t.d_di5y = sample_std(c.d_di5y);
    t.macro = sample_std(c.macro);
    t.riscobr = sample_std(c.riscobr);
    t.global = sample_std(c.global);
    t.residual = sample_std(c.residual);
    t.fitted = sample_std(c.fitted());
    return t;
}

VarianceShares variance_shares(const ContributionFrame& c) {
    if (c.rows() < 2) throw InsufficientDataError("variance_shares needs at least 2 rows");
    const std::array<const std::vector<double>*, 3> cols = {&c.macro, &c.riscobr, &c.global};
    std::array<double, 3> var{};
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        var[i] = sample_variance(*cols[i]);
        total += var[i];
    }
    if (!(total > 0.0)) throw DegenerateError("variance_shares: all factor contributions are constant");

    VarianceShares out;
    for (std::size_t i = 0; i < 3; ++i) out.share[i] = var[i] / total;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) {
                out.correlation[i][j] = var[i] > 0.0 ? std::optional<double>(1.0) : std::nullopt;
            } else {
                out.correlation[i][j] = correlation(*cols[i], *cols[j]);
            }
        }
    }
    return out;
}

bool row_sum_matches(std::span<const double> components, double total, double tol) {
    double s = 0.0;
    for (double v : components) s += v;
    return std::abs(s - total) <= tol;
}

void verify_daily_identity(const ContributionFrame& c, double tol) {
    for (std::size_t i = 0; i < c.rows(); ++i) {
        const std::array<double, 5> parts = {c.constant[i], c.macro[i], c.riscobr[i], c.global[i], c.residual[i]};
        if (!row_sum_matches(parts, c.d_di5y[i], tol)) {
            throw NumericalError("daily identity broken on " + c.dates[i].iso());
        }
    }
}

void verify_cumulative_identity(const CumulativeFrame& c, double tol) {
    for (std::size_t i = 0; i < c.rows(); ++i) {
        const std::array<double, 5> parts = {c.const_cum[i], c.macro_cum[i], c.riscobr_cum[i], c.global_cum[i],
                                             c.residual_cum[i]};
        if (!row_sum_matches(parts, c.di5y_change_cum[i], tol)) {
            throw NumericalError("cumulative identity broken on " + c.dates[i].iso());
        }
    }
}

}  // namespace didecomp
