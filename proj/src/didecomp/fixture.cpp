#include "didecomp/fixture.hpp"

#include "didecomp/cds_split.hpp"
#include "didecomp/config.hpp"
#include "didecomp/errors.hpp"
#include "didecomp/ingestion.hpp"
#include "didecomp/pls.hpp"
#include "didecomp/text_io.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace didecomp {

namespace {

/// Portable standard normals: the std distributions are not specified
/// bit-for-bit across standard libraries, the engine is.
class Normal {
public:
    explicit Normal(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::vector<double> draw(std::size_t n, double sd = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = sd * (*this)();
        return v;
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

void rescale(std::vector<double>& v, double target_std) {
    const double m = mean(v);
    const double s = sample_std(v);
    for (auto& x : v) x = (x - m) / s * target_std;
}

/// Residual of v on [1, regressors] (in-sample projection).
std::vector<double> orthogonalize(const std::vector<double>& v, const std::vector<std::vector<double>>& regressors) {
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(regressors.size()) + 1);
    z.col(0).setOnes();
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        z.col(static_cast<Eigen::Index>(j) + 1) = Eigen::Map<const Eigen::VectorXd>(regressors[j].data(), n);
    }
    const Eigen::Map<const Eigen::VectorXd> y(v.data(), n);
    const Eigen::VectorXd b = z.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd r = y - z * b;
    return {r.data(), r.data() + n};
}

struct FocusSpec {
    Indicator indicator;
    std::array<double, 4> start;  ///< current year .. year + 3
    double scale;
    double loading;
};

// Starting levels follow the first survey row of the published table for
// IPCA; the others are plausible 2004 medians.
const std::array<FocusSpec, 5> kFocusSpecs = {{
    {Indicator::IPCA, {6.00, 5.00, 4.50, 4.00}, 0.010, 1.0},
    {Indicator::Selic, {16.50, 14.50, 13.00, 12.00}, 0.020, 1.0},
    {Indicator::PIB, {3.50, 3.50, 3.50, 3.50}, 0.005, -1.0},
    {Indicator::Primario, {4.25, 4.25, 4.00, 4.00}, 0.005, -1.0},
    {Indicator::Nominal, {-2.50, -2.00, -1.80, -1.50}, 0.010, 1.0},
}};

constexpr double kFocusNoise = 0.02;  // idiosyncratic share of each Focus diff

}  // namespace

FixtureResult generate_fixture(const FixtureParams& p, const std::filesystem::path& out_dir) {
    if (p.n < 100) throw ConfigError("fixture: n must be at least 100 (got " + std::to_string(p.n) + ")");
    if (!(p.r2 > 0.0 && p.r2 < 1.0)) throw ConfigError("fixture: r2 must lie in (0, 1)");
    if (!(p.macro_std > 0.0 && p.dom_std > 0.0 && p.glob_std > 0.0)) {
        throw ConfigError("fixture: component standard deviations must be positive");
    }
    for (double b : p.betas) {
        if (!std::isfinite(b)) throw ConfigError("fixture: betas must be finite");
    }

    // Calendar: weekdays from 2004-01-02; the decomposition sample starts on
    // 2015-01-13 and has n rows. Index 0 is the first level date; changes
    // exist from index 1.
    const TradingDate first{2004, 1, 2};
    const TradingDate sample_start{2015, 1, 13};
    std::vector<TradingDate> dates{first};
    std::size_t s0 = 0;
    while (dates.back() < sample_start) dates.push_back(dates.back().next_weekday());
    s0 = dates.size() - 1;
    while (dates.size() < s0 + p.n) dates.push_back(dates.back().next_weekday());
    const std::size_t total = dates.size();
    const std::size_t n_pre = s0 - 1;  // change rows before the sample
    const std::size_t n = p.n;

    Normal rng(p.seed);

    // Macro factor on change rows 1..total-1, standardized over all of them,
    // with std ~ macro_std inside the sample.
    const double k2 = p.macro_std * p.macro_std;
    const double pre_var =
        std::max(0.05, (static_cast<double>(n_pre + n) - 1.0 - (static_cast<double>(n) - 1.0) * k2) /
                           (static_cast<double>(n_pre) - 1.0));
    std::vector<double> macro = rng.draw(total - 1, std::sqrt(pre_var));
    for (std::size_t i = n_pre; i < macro.size(); ++i) macro[i] *= p.macro_std / std::sqrt(pre_var);
    rescale(macro, 1.0);
    const auto macro_at = [&](std::size_t row) { return macro[row - 1]; };

    // Global regressors and CDS components on the sample rows.
    const std::array<double, 4> g_sd = {0.005, 0.010, 0.060, 0.050};
    const std::array<double, 4> g_dir = {1.0, -0.5, 0.08, 0.02};
    std::vector<std::vector<double>> g(4);
    for (std::size_t j = 0; j < 4; ++j) g[j] = rng.draw(n, g_sd[j]);
    std::vector<double> glob_net(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 4; ++j) glob_net[i] += g_dir[j] * g[j][i];
    }
    const double gamma_scale = p.glob_std / sample_std(glob_net);
    std::array<double, 4> gamma{};
    for (std::size_t j = 0; j < 4; ++j) gamma[j] = g_dir[j] * gamma_scale;
    std::vector<double> glob(n);
    for (std::size_t i = 0; i < n; ++i) glob[i] = p.cds_alpha + gamma_scale * glob_net[i];

    // Domestic component orthogonal to the regressors in sample, so the split
    // returns alpha and gamma exactly.
    std::vector<double> dom = orthogonalize(rng.draw(n), g);
    rescale(dom, p.dom_std);

    // Target and noise. The noise is made orthogonal to the true design in
    // sample, so OLS on the true factors returns the generating betas and the
    // in-sample R^2 equals the target.
    const auto& b = p.betas;
    std::vector<double> macro_s(n);
    std::vector<double> systematic(n);
    for (std::size_t i = 0; i < n; ++i) {
        macro_s[i] = macro_at(s0 + i);
        systematic[i] = b[1] * macro_s[i] + b[2] * dom[i] + b[3] * glob[i];
    }
    const double v_fit = sample_variance(systematic);
    const double sigma = std::sqrt(v_fit * (1.0 - p.r2) / p.r2);
    std::vector<double> eps = orthogonalize(rng.draw(n), {macro_s, dom, glob});
    rescale(eps, sigma);

    std::vector<double> y(total, 0.0);  // bps change at row t (t >= 1)
    const std::vector<double> nu = rng.draw(n_pre, sigma);
    for (std::size_t t = 1; t < s0; ++t) y[t] = b[0] + b[1] * macro_at(t) + nu[t - 1];
    for (std::size_t i = 0; i < n; ++i) y[s0 + i] = b[0] + systematic[i] + eps[i];

    // Levels.
    MarketDataset market;
    {
        std::vector<double> di(total);
        double level = 12.50;
        for (std::size_t t = 0; t < total; ++t) {
            if (t > 0) level += y[t] / 100.0;
            di[t] = level;
        }
        market.add(DailySeries("DI5Y", dates, di));

        std::vector<TradingDate> cds_dates(dates.begin() + static_cast<std::ptrdiff_t>(s0) - 1, dates.end());
        std::vector<double> cds(n + 1);
        cds[0] = 250.0;
        for (std::size_t i = 0; i < n; ++i) cds[i + 1] = cds[i] * std::exp(glob[i] + dom[i]);
        market.add(DailySeries("CDS", cds_dates, cds));

        const std::array<const char*, 4> names = {"DXY", "CRB", "VIX", "UST10"};
        const std::array<double, 4> start = {90.0, 220.0, 18.0, 2.0};
        const std::vector<double> pre_noise = rng.draw(4 * (s0 - 1));
        for (std::size_t j = 0; j < 4; ++j) {
            std::vector<double> lv(total);
            lv[0] = start[j];
            for (std::size_t t = 1; t < total; ++t) {
                const double r = t < s0 ? g_sd[j] * pre_noise[j * (s0 - 1) + t - 1] : g[j][t - s0];
                lv[t] = j == 3 ? lv[t - 1] + r : lv[t - 1] * std::exp(r);
            }
            market.add(DailySeries(names[j], dates, lv));
        }
    }

    // Focus horizons and the surprise index load on the macro factor.
    std::vector<FocusRecord> records;
    records.reserve(total * 20);
    {
        std::vector<std::array<double, 4>> level(kFocusSpecs.size());
        for (std::size_t s = 0; s < kFocusSpecs.size(); ++s) level[s] = kFocusSpecs[s].start;
        for (std::size_t t = 0; t < total; ++t) {
            for (std::size_t s = 0; s < kFocusSpecs.size(); ++s) {
                const auto& spec = kFocusSpecs[s];
                for (int h = 0; h < 4; ++h) {
                    if (t > 0) level[s][h] += spec.scale * (spec.loading * macro_at(t) + kFocusNoise * rng());
                    records.push_back({dates[t], spec.indicator, dates[t].year() + h, level[s][h]});
                }
            }
        }
        std::vector<double> surprise(total, 0.0);
        for (std::size_t t = 1; t < total; ++t) surprise[t] = surprise[t - 1] + macro_at(t) + kFocusNoise * rng();
        market.add(DailySeries("SURPRISE", dates, surprise));
    }
    std::vector<FocusRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const FocusRecord& a, const FocusRecord& c) {
        if (!(a.survey_date == c.survey_date)) return a.survey_date < c.survey_date;
        if (a.indicator != c.indicator) return a.indicator < c.indicator;
        return a.reference_year < c.reference_year;
    });
    const FocusPanel panel(std::move(sorted));

    // Analytic standard errors: sigma * sqrt(diag((Z'Z)^-1)), Z = [1, M, D, G].
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        z(r, 0) = 1.0;
        z(r, 1) = macro_s[i];
        z(r, 2) = dom[i];
        z(r, 3) = glob[i];
    }
    const Eigen::MatrixXd zz_inv = (z.transpose() * z).inverse();

    const std::vector<TradingDate> sample_dates(dates.begin() + static_cast<std::ptrdiff_t>(s0), dates.end());
    const Frame truth_frame(sample_dates, {"macro", "cds_dom", "cds_glob", "d_di5y_bps"},
                            {macro_s, dom, glob, std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(s0), y.end())});

    Json truth;
    truth["seed"] = p.seed;
    truth["n"] = n;
    truth["r2_target"] = p.r2;
    truth["sample_start"] = sample_dates.front().iso();
    truth["sample_end"] = sample_dates.back().iso();
    truth["noise_sigma_bps"] = sigma;
    const std::array<const char*, 4> beta_names = {"beta_0", "beta_M", "beta_D", "beta_G"};
    for (std::size_t j = 0; j < 4; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        truth["betas"][beta_names[j]] = b[j];
        truth["standard_errors"][beta_names[j]] = sigma * std::sqrt(zz_inv(jj, jj));
    }
    truth["cds_split"] = {{"alpha", p.cds_alpha}, {"gamma", gamma}};
    truth["std_dev_bps"] = {{"d_di5y", sample_std(truth_frame.column("d_di5y_bps"))},
                            {"macro", std::abs(b[1]) * sample_std(macro_s)},
                            {"riscobr", std::abs(b[2]) * sample_std(dom)},
                            {"global", std::abs(b[3]) * sample_std(glob)},
                            {"residual", sigma}};
    truth["files"] = {{"market", kFixtureMarketFile},
                      {"focus", kFixtureFocusFile},
                      {"factors", kFixtureFactorsFile},
                      {"config", kFixtureConfigFile}};

    std::string config;
    config += "# synthetic fixture, seed " + std::to_string(p.seed) + "\n";
    config += "[data]\nmarket_csv = " + std::string(kFixtureMarketFile) + "\n";
    config += "focus_cache = " + std::string(kFixtureFocusFile) + "\n\n";
    config += "[sample]\nstart = " + sample_dates.front().iso() + "\nend = " + sample_dates.back().iso() + "\n\n";
    config += "[output]\ndir = out\n\n[fixture]\nseed = " + std::to_string(p.seed) + "\n";

    ensure_output_dir(out_dir);
    std::vector<std::string> market_cols(kMarketRoster.begin(), kMarketRoster.end());
    const std::vector<std::pair<std::string, std::string>> contents = {
        {kFixtureMarketFile, market_csv(market, market_cols)},
        {kFixtureFocusFile, focus_panel_csv(panel)},
        {kFixtureFactorsFile, frame_csv(truth_frame)},
        {kFixtureTruthFile, truth.dump(2) + "\n"},
        {kFixtureConfigFile, config},
    };
    FixtureResult result;
    result.truth = std::move(truth);
    for (const auto& [name, text] : contents) {
        write_text_file(out_dir / name, text);
        result.files.push_back(out_dir / name);
    }
    return result;
}

}  // namespace didecomp
