#include "didecomp/series.hpp"

#include "didecomp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace didecomp {

namespace {

std::chrono::year_month_day make_ymd(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "invalid calendar date %04d-%02u-%02u", year, month, day);
        throw DataError(buf);
    }
    return ymd;
}

template <typename Int>
bool parse_fixed_digits(std::string_view text, Int& out) {
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

void require_two_points(const DailySeries& s, const char* op) {
    if (s.size() < 2) {
        throw InsufficientDataError(std::string(op) + " of '" + s.name() + "' needs at least 2 points, got " +
                                    std::to_string(s.size()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// TradingDate
// ---------------------------------------------------------------------------

TradingDate::TradingDate(int year, unsigned month, unsigned day) : ymd_(make_ymd(year, month, day)) {}

TradingDate::TradingDate(std::chrono::sys_days days) : ymd_(days) {}

std::optional<TradingDate> TradingDate::try_parse(std::string_view text) noexcept {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (!parse_fixed_digits(text.substr(0, 4), y) || !parse_fixed_digits(text.substr(5, 2), m) ||
        !parse_fixed_digits(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return TradingDate(std::chrono::sys_days{ymd});
}

TradingDate TradingDate::parse(std::string_view text) {
    auto d = try_parse(text);
    if (!d) throw ParseError("invalid ISO-8601 date '" + std::string(text) + "'");
    return *d;
}

std::string TradingDate::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

TradingDate TradingDate::next_weekday() const {
    auto next = days() + std::chrono::days{1};
    while (std::chrono::weekday{next} == std::chrono::Saturday || std::chrono::weekday{next} == std::chrono::Sunday) {
        next += std::chrono::days{1};
    }
    return TradingDate(next);
}

// ---------------------------------------------------------------------------
// DailySeries
// ---------------------------------------------------------------------------

DailySeries::DailySeries(std::string name, std::vector<Observation> points)
    : name_(std::move(name)), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].value)) {
            throw DataError("series '" + name_ + "' has a non-finite value at " + points_[i].date.iso());
        }
        if (i > 0 && !(points_[i - 1].date < points_[i].date)) {
            throw DataError("series '" + name_ + "' dates are not strictly increasing at " + points_[i].date.iso());
        }
    }
}

DailySeries::DailySeries(std::string name, std::vector<TradingDate> dates, std::vector<double> values) {
    if (dates.size() != values.size()) {
        throw SchemaError("series '" + name + "': " + std::to_string(dates.size()) + " dates but " +
                          std::to_string(values.size()) + " values");
    }
    std::vector<Observation> points;
    points.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) points.push_back({dates[i], values[i]});
    *this = DailySeries(std::move(name), std::move(points));
}

std::vector<TradingDate> DailySeries::dates() const {
    std::vector<TradingDate> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.date);
    return out;
}

std::vector<double> DailySeries::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.value);
    return out;
}

DailySeries DailySeries::renamed(std::string name) const {
    DailySeries copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

DailySeries DailySeries::between(std::optional<TradingDate> start, std::optional<TradingDate> end) const {
    std::vector<Observation> kept;
    for (const auto& p : points_) {
        if (start && p.date < *start) continue;
        if (end && *end < p.date) continue;
        kept.push_back(p);
    }
    return DailySeries(name_, std::move(kept));
}

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

Frame::Frame(std::vector<TradingDate> dates, std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : dates_(std::move(dates)), names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size()) {
        throw SchemaError("frame has " + std::to_string(names_.size()) + " names but " +
                          std::to_string(columns_.size()) + " columns");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (!seen.insert(names_[j]).second) throw SchemaError("duplicate column name '" + names_[j] + "'");
        if (columns_[j].size() != dates_.size()) {
            throw SchemaError("column '" + names_[j] + "' has " + std::to_string(columns_[j].size()) +
                              " rows, date index has " + std::to_string(dates_.size()));
        }
    }
}

bool Frame::has(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> Frame::column(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw SchemaError("frame has no column '" + std::string(name) + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

DailySeries Frame::series(std::string_view name) const {
    auto col = column(name);
    return DailySeries(std::string(name), dates_, std::vector<double>(col.begin(), col.end()));
}

Frame Frame::select(const std::vector<std::string>& names) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& n : names) {
        auto c = column(n);
        cols.emplace_back(c.begin(), c.end());
    }
    return Frame(dates_, names, std::move(cols));
}

Frame Frame::between(std::optional<TradingDate> start, std::optional<TradingDate> end) const {
    std::vector<TradingDate> dates;
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (start && dates_[i] < *start) continue;
        if (end && *end < dates_[i]) continue;
        dates.push_back(dates_[i]);
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(columns_[j][i]);
    }
    return Frame(std::move(dates), names_, std::move(cols));
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

DailySeries log_return(const DailySeries& s) {
    require_two_points(s, "log_return");
    for (const auto& p : s.points()) {
        if (!(p.value > 0.0)) {
            throw DomainError("log_return of '" + s.name() + "': non-positive value " + std::to_string(p.value) +
                              " on " + p.date.iso());
        }
    }
    std::vector<Observation> out;
    out.reserve(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) {
        out.push_back({s[i].date, std::log(s[i].value) - std::log(s[i - 1].value)});
    }
    return DailySeries(s.name(), std::move(out));
}

DailySeries diff(const DailySeries& s) {
    require_two_points(s, "diff");
    std::vector<Observation> out;
    out.reserve(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) out.push_back({s[i].date, s[i].value - s[i - 1].value});
    return DailySeries(s.name(), std::move(out));
}

DailySeries to_bps_change(const DailySeries& s) {
    auto d = diff(s);
    std::vector<Observation> out = d.points();
    for (auto& p : out) p.value *= 100.0;
    return DailySeries(s.name(), std::move(out));
}

Frame inner_join(std::span<const DailySeries> series) {
    if (series.empty()) throw SchemaError("inner_join needs at least one series");
    std::unordered_set<std::string> names;
    for (const auto& s : series) {
        if (!names.insert(s.name()).second) throw SchemaError("inner_join: duplicate series name '" + s.name() + "'");
    }

    // Sorted-merge intersection: advance a cursor per series.
    std::vector<std::size_t> cursor(series.size(), 0);
    std::vector<TradingDate> dates;
    std::vector<std::vector<double>> cols(series.size());
    while (true) {
        bool exhausted = false;
        std::optional<TradingDate> latest;
        for (std::size_t k = 0; k < series.size(); ++k) {
            if (cursor[k] >= series[k].size()) {
                exhausted = true;
                break;
            }
            const auto& d = series[k][cursor[k]].date;
            if (!latest || *latest < d) latest = d;
        }
        if (exhausted) break;

        bool aligned = true;
        for (std::size_t k = 0; k < series.size(); ++k) {
            while (cursor[k] < series[k].size() && series[k][cursor[k]].date < *latest) ++cursor[k];
            if (cursor[k] >= series[k].size() || !(series[k][cursor[k]].date == *latest)) aligned = false;
        }
        if (!aligned) continue;

        dates.push_back(*latest);
        for (std::size_t k = 0; k < series.size(); ++k) {
            cols[k].push_back(series[k][cursor[k]].value);
            ++cursor[k];
        }
    }

    std::vector<std::string> ordered;
    ordered.reserve(series.size());
    for (const auto& s : series) ordered.push_back(s.name());
    return Frame(std::move(dates), std::move(ordered), std::move(cols));
}

Frame inner_join(std::initializer_list<DailySeries> series) {
    return inner_join(std::span<const DailySeries>(series.begin(), series.size()));
}

std::pair<Frame, StandardizationParams> standardize(const Frame& f) {
    StandardizationParams params;
    params.names = f.names();
    std::vector<std::vector<double>> out;
    out.reserve(f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) {
        auto col = f.column(j);
        if (col.size() < 2) {
            throw InsufficientDataError("standardize: column '" + f.names()[j] + "' needs at least 2 rows");
        }
        const double m = mean(col);
        const double sd = sample_std(col);
        // Relative test: a column whose spread is pure rounding noise is constant.
        double scale = 0.0;
        for (double v : col) scale = std::max(scale, std::abs(v));
        if (!(sd > 1e-14 * std::max(scale, 1e-300))) {
            throw DegenerateError("standardize: column '" + f.names()[j] + "' has zero variance");
        }
        std::vector<double> z(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) z[i] = (col[i] - m) / sd;
        out.push_back(std::move(z));
        params.mean.push_back(m);
        params.std.push_back(sd);
    }
    return {Frame(f.dates(), f.names(), std::move(out)), std::move(params)};
}

Frame unstandardize(const Frame& f, const StandardizationParams& params) {
    if (f.names() != params.names) throw SchemaError("unstandardize: frame columns do not match parameters");
    std::vector<std::vector<double>> out;
    out.reserve(f.cols());
    for (std::size_t j = 0; j < f.cols(); ++j) {
        auto col = f.column(j);
        std::vector<double> x(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) x[i] = col[i] * params.std[j] + params.mean[j];
        out.push_back(std::move(x));
    }
    return Frame(f.dates(), f.names(), std::move(out));
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

double mean(std::span<const double> x) {
    if (x.empty()) throw InsufficientDataError("mean of an empty vector");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw SchemaError("covariance of vectors with different lengths");
    if (x.size() < 2) throw InsufficientDataError("covariance needs at least 2 values");
    const double mx = mean(x);
    const double my = mean(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(x.size() - 1);
}

double sample_variance(std::span<const double> x) { return sample_covariance(x, x); }

double sample_std(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

std::optional<double> correlation(std::span<const double> x, std::span<const double> y) {
    const double vx = sample_variance(x);
    const double vy = sample_variance(y);
    if (!(vx > 0.0) || !(vy > 0.0)) return std::nullopt;
    return std::clamp(sample_covariance(x, y) / std::sqrt(vx * vy), -1.0, 1.0);
}

}  // namespace didecomp
