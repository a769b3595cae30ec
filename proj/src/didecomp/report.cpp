#include "didecomp/report.hpp"

#include "didecomp/errors.hpp"
#include "didecomp/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace didecomp {

namespace {

Json vec(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<double> as_doubles(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw ParseError(std::string("model file lacks array '") + key + "'");
    std::vector<double> out;
    for (const auto& v : j[key]) out.push_back(v.get<double>());
    return out;
}

template <std::size_t N>
std::string fixed_columns_csv(const char* header, const std::vector<TradingDate>& dates,
                              const std::array<const std::vector<double>*, N>& cols) {
    std::string out = header;
    out += '\n';
    for (std::size_t i = 0; i < dates.size(); ++i) {
        out += dates[i].iso();
        for (const auto* c : cols) {
            out += ',';
            out += format_fixed((*c)[i], 4);
        }
        out += '\n';
    }
    return out;
}

double nice_step(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

Json to_json(const PlsModel& m) {
    Json j;
    j["series"] = kMacroFactorName;
    j["columns"] = m.columns;
    j["weights"] = vec(m.weights);
    j["input_mean"] = vec(m.input.mean);
    j["input_std"] = vec(m.input.std);
    j["sign"] = m.sign;
    j["factor_mean"] = m.factor_mean;
    j["factor_std"] = m.factor_std;
    j["observations"] = m.n_observations;
    return j;
}

PlsModel pls_model_from_json(const Json& j) {
    PlsModel m;
    try {
        m.columns = j.at("columns").get<std::vector<std::string>>();
        m.weights = as_doubles(j, "weights");
        m.input.names = m.columns;
        m.input.mean = as_doubles(j, "input_mean");
        m.input.std = as_doubles(j, "input_std");
        m.sign = j.at("sign").get<int>();
        m.factor_mean = j.at("factor_mean").get<double>();
        m.factor_std = j.at("factor_std").get<double>();
        m.n_observations = j.value("observations", std::size_t{0});
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed PLS model: ") + e.what());
    }
    const auto k = m.columns.size();
    if (m.weights.size() != k || m.input.mean.size() != k || m.input.std.size() != k) {
        throw ParseError("malformed PLS model: vector lengths differ from the column count");
    }
    if (m.sign != 1 && m.sign != -1) throw ParseError("malformed PLS model: sign must be +1 or -1");
    return m;
}

Json to_json(const OlsFit& fit, const SignificanceThresholds& thresholds) {
    Json coefs = Json::array();
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        Json c;
        c["name"] = fit.names[i];
        c["value"] = fit.coefficients[i];
        c["std_error"] = fit.standard_errors[i];
        c["t"] = std::isfinite(fit.t_statistics[i]) ? Json(fit.t_statistics[i]) : Json(nullptr);
        c["p"] = fit.p_values[i];
        c["significance"] = thresholds.label(fit.p_values[i]);
        coefs.push_back(std::move(c));
    }
    Json j;
    j["coefficients"] = std::move(coefs);
    j["r_squared"] = fit.r_squared;
    j["adj_r_squared"] = fit.adj_r_squared;
    j["residual_std_error"] = fit.residual_std_error;
    j["observations"] = fit.n_observations;
    j["residual_dof"] = fit.residual_dof();
    return j;
}

Json to_json(const CdsSplitModel& m) {
    Json j;
    j["alpha"] = m.alpha;
    Json g;
    for (std::size_t i = 0; i < kGlobalRegressors.size(); ++i) g[kGlobalRegressors[i]] = m.gamma[i];
    j["gamma"] = std::move(g);
    j["fit"] = to_json(m.fit, SignificanceThresholds{});
    return j;
}

Json to_json(const DecompositionModel& m, const SignificanceThresholds& thresholds) {
    Json j;
    j["beta0"] = m.beta0;
    j["beta_macro"] = m.beta_macro;
    j["beta_dom"] = m.beta_dom;
    j["beta_glob"] = m.beta_glob;
    j["fit"] = to_json(m.fit, thresholds);
    j["thresholds"] = {{"highly", thresholds.highly}, {"significant", thresholds.significant},
                       {"weak", thresholds.weak}};
    return j;
}

Json to_json(const LoadReport& r) {
    Json j;
    j["fetched"] = r.fetched;
    j["deduplicated"] = r.deduplicated;
    j["dropped"] = r.dropped;
    j["rejected"] = r.rejected;
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const StdDevTable& t) {
    Json j;
    j["d_di5y"] = t.d_di5y;
    j["macro"] = t.macro;
    j["riscobr"] = t.riscobr;
    j["global"] = t.global;
    j["residual"] = t.residual;
    j["fitted"] = t.fitted;
    return j;
}

Json to_json(const VarianceShares& s) {
    Json j;
    Json shares;
    for (std::size_t i = 0; i < 3; ++i) shares[kContributionNames[i]] = s.share[i];
    j["shares"] = std::move(shares);
    Json corr = Json::array();
    for (const auto& row : s.correlation) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(optional_number(v));
        corr.push_back(std::move(r));
    }
    j["correlation_order"] = {kContributionNames[0], kContributionNames[1], kContributionNames[2]};
    j["correlation"] = std::move(corr);
    return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string contributions_csv(const ContributionFrame& c) {
    return fixed_columns_csv<6>("date,d_di5y_bps,const_bps,macro_bps,riscobr_bps,global_bps,residual_bps", c.dates,
                                {&c.d_di5y, &c.constant, &c.macro, &c.riscobr, &c.global, &c.residual});
}

std::string cumulative_csv(const CumulativeFrame& c) {
    return fixed_columns_csv<6>("date,di5y_change_cum,const_cum,macro_cum,riscobr_cum,global_cum,residual_cum",
                                c.dates,
                                {&c.di5y_change_cum, &c.const_cum, &c.macro_cum, &c.riscobr_cum, &c.global_cum,
                                 &c.residual_cum});
}

std::string frame_csv(const Frame& f) {
    std::string out = "date";
    for (const auto& n : f.names()) out += "," + n;
    out += '\n';
    for (std::size_t i = 0; i < f.rows(); ++i) {
        out += f.dates()[i].iso();
        for (std::size_t j = 0; j < f.cols(); ++j) {
            out += ',';
            out += format_shortest(f.column(j)[i]);
        }
        out += '\n';
    }
    return out;
}

Frame read_frame_csv(const std::filesystem::path& path, const std::vector<std::string>& columns) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError("'" + path.string() + "' is empty");
    const auto header = split_csv_line(lines[0]);
    if (trim(header[0]) != "date") throw SchemaError("'" + path.string() + "': first column must be 'date'");
    std::vector<std::size_t> index;
    for (const auto& c : columns) {
        auto it = std::find_if(header.begin(), header.end(), [&](std::string_view h) { return trim(h) == c; });
        if (it == header.end()) throw SchemaError("'" + path.string() + "' lacks column '" + c + "'");
        index.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<TradingDate> dates;
    std::vector<std::vector<double>> cols(columns.size());
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto cells = split_csv_line(lines[ln]);
        const std::string where = "'" + path.filename().string() + "' line " + std::to_string(ln + 1);
        if (cells.size() != header.size()) throw ParseError(where + ": wrong number of cells");
        const auto d = TradingDate::try_parse(trim(cells[0]));
        if (!d) throw ParseError(where + ": bad date");
        if (!dates.empty() && !(dates.back() < *d)) throw ParseError(where + ": dates must be increasing");
        dates.push_back(*d);
        for (std::size_t j = 0; j < index.size(); ++j) {
            const auto v = parse_double_strict(cells[index[j]]);
            if (!v) throw ParseError(where + ": bad value in column " + columns[j]);
            cols[j].push_back(*v);
        }
    }
    return Frame(std::move(dates), columns, std::move(cols));
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

std::string render_svg(const CumulativeFrame& c) {
    if (c.rows() < 2) throw InsufficientDataError("SVG chart needs at least 2 rows");
    const std::size_t last = c.rows() - 1;
    const std::array<double, 5> parts = {c.const_cum[last], c.macro_cum[last], c.riscobr_cum[last],
                                         c.global_cum[last], c.residual_cum[last]};
    if (!row_sum_matches(parts, c.di5y_change_cum[last], 1e-6)) {
        throw NumericalError("cumulative components do not add up on " + c.dates[last].iso());
    }

    const std::array<const std::vector<double>*, 6> series = {&c.di5y_change_cum, &c.const_cum, &c.macro_cum,
                                                              &c.riscobr_cum, &c.global_cum, &c.residual_cum};
    const std::array<const char*, 6> labels = {"DI5Y change (cum)", "Constant", "Macro/BC", "Brazil risk (CDS dom)",
                                               "External risk (CDS glob)", "Residual"};
    const std::array<const char*, 6> colors = {"#000000", "#7f7f7f", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};

    constexpr double kWidth = 1000.0;
    constexpr double kHeight = 560.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 230.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 50.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double lo = 0.0;
    double hi = 0.0;
    for (const auto* s : series) {
        for (double v : *s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double step = nice_step(hi - lo);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;
    if (!(hi > lo)) hi = lo + step;

    const double d0 = static_cast<double>(c.dates.front().days().time_since_epoch().count());
    const double d1 = static_cast<double>(c.dates.back().days().time_since_epoch().count());
    auto x_of = [&](const TradingDate& d) {
        const double t = static_cast<double>(d.days().time_since_epoch().count());
        return kLeft + (d1 > d0 ? (t - d0) / (d1 - d0) : 0.0) * plot_w;
    };
    auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(kWidth, 0) + "\" height=\"" +
           format_fixed(kHeight, 0) + "\" viewBox=\"0 0 " + format_fixed(kWidth, 0) + " " +
           format_fixed(kHeight, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<title>Cumulative decomposition of DI5Y daily changes (bps)</title>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + format_fixed(kLeft, 0) +
           "\" y=\"24\" font-size=\"15\">Decomposition of DI5Y: Macro, Brazil risk, External risk (cumulative bps)</text>\n";

    // Value axis with grid.
    svg += "<g class=\"y-axis\" stroke=\"#dddddd\">\n";
    for (double v = lo; v <= hi + 0.5 * step; v += step) {
        const double y = y_of(v);
        svg += "<line x1=\"" + format_fixed(kLeft, 2) + "\" y1=\"" + format_fixed(y, 2) + "\" x2=\"" +
               format_fixed(kLeft + plot_w, 2) + "\" y2=\"" + format_fixed(y, 2) + "\"/>\n";
        svg += "<text x=\"" + format_fixed(kLeft - 6, 2) + "\" y=\"" + format_fixed(y + 4, 2) +
               "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333333\">" + format_fixed(v, step < 1.0 ? 2 : 0) +
               "</text>\n";
    }
    svg += "</g>\n";

    // Date axis: one tick per calendar year present.
    svg += "<g class=\"x-axis\" stroke=\"#999999\">\n";
    svg += "<line x1=\"" + format_fixed(kLeft, 2) + "\" y1=\"" + format_fixed(kTop + plot_h, 2) + "\" x2=\"" +
           format_fixed(kLeft + plot_w, 2) + "\" y2=\"" + format_fixed(kTop + plot_h, 2) + "\"/>\n";
    int tick_year = c.dates.front().year();
    for (const auto& d : c.dates) {
        if (d.year() < tick_year) continue;
        const double x = x_of(d);
        svg += "<line x1=\"" + format_fixed(x, 2) + "\" y1=\"" + format_fixed(kTop + plot_h, 2) + "\" x2=\"" +
               format_fixed(x, 2) + "\" y2=\"" + format_fixed(kTop + plot_h + 5, 2) + "\"/>\n";
        svg += "<text x=\"" + format_fixed(x, 2) + "\" y=\"" + format_fixed(kTop + plot_h + 20, 2) +
               "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333333\">" + d.iso() + "</text>\n";
        tick_year = d.year() + std::max(1, (c.dates.back().year() - c.dates.front().year()) / 8 + 1);
    }
    svg += "</g>\n";

    svg += "<g class=\"series-group\" fill=\"none\" stroke-width=\"1.4\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        svg += "<polyline class=\"series\" id=\"series-" + std::string(kCumulativeSeries[k]) + "\" data-series=\"" +
               kCumulativeSeries[k] + "\" stroke=\"" + colors[k] + "\" points=\"";
        for (std::size_t i = 0; i < c.rows(); ++i) {
            if (i) svg += ' ';
            svg += format_fixed(x_of(c.dates[i]), 2) + "," + format_fixed(y_of((*series[k])[i]), 2);
        }
        svg += "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g class=\"legend\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double y = kTop + 10.0 + 22.0 * static_cast<double>(k);
        const double x = kLeft + plot_w + 16.0;
        svg += "<line x1=\"" + format_fixed(x, 2) + "\" y1=\"" + format_fixed(y, 2) + "\" x2=\"" +
               format_fixed(x + 24, 2) + "\" y2=\"" + format_fixed(y, 2) + "\" stroke=\"" + colors[k] +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + format_fixed(x + 30, 2) + "\" y=\"" + format_fixed(y + 4, 2) + "\">" + labels[k] +
               "</text>\n";
    }
    svg += "</g>\n";
    svg += "</svg>\n";
    return svg;
}

void emit_svg(const CumulativeFrame& c, const std::filesystem::path& path) { write_text_file(path, render_svg(c)); }

}  // namespace didecomp
