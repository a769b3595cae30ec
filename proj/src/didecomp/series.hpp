#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace didecomp {

/// Calendar date of an end-of-day observation. No time-of-day, no timezone.
class TradingDate {
public:
    /// Throws DataError if the triple is not a valid Gregorian date.
    TradingDate(int year, unsigned month, unsigned day);
    explicit TradingDate(std::chrono::sys_days days);

    /// Parses strict ISO-8601 `YYYY-MM-DD`.
    static TradingDate parse(std::string_view text);
    static std::optional<TradingDate> try_parse(std::string_view text) noexcept;

    [[nodiscard]] int year() const noexcept { return static_cast<int>(ymd_.year()); }
    [[nodiscard]] unsigned month() const noexcept { return static_cast<unsigned>(ymd_.month()); }
    [[nodiscard]] unsigned day() const noexcept { return static_cast<unsigned>(ymd_.day()); }
    [[nodiscard]] std::chrono::sys_days days() const noexcept { return std::chrono::sys_days{ymd_}; }
    [[nodiscard]] std::string iso() const;

    /// Next Monday-to-Friday date (no holiday calendar).
    [[nodiscard]] TradingDate next_weekday() const;

    friend bool operator==(const TradingDate& a, const TradingDate& b) noexcept { return a.ymd_ == b.ymd_; }
    friend std::strong_ordering operator<=>(const TradingDate& a, const TradingDate& b) noexcept {
        return a.days().time_since_epoch().count() <=> b.days().time_since_epoch().count();
    }

private:
    std::chrono::year_month_day ymd_;
};

struct Observation {
    TradingDate date;
    double value;
};

/// Named, strictly date-increasing sequence of finite observations.
class DailySeries {
public:
    DailySeries() = default;
    /// Throws DataError on non-increasing dates or non-finite values.
    DailySeries(std::string name, std::vector<Observation> points);
    DailySeries(std::string name, std::vector<TradingDate> dates, std::vector<double> values);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] const std::vector<Observation>& points() const noexcept { return points_; }
    [[nodiscard]] const Observation& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] std::vector<TradingDate> dates() const;
    [[nodiscard]] std::vector<double> values() const;

    [[nodiscard]] DailySeries renamed(std::string name) const;
    /// Observations with start <= date <= end; either bound may be absent.
    [[nodiscard]] DailySeries between(std::optional<TradingDate> start, std::optional<TradingDate> end) const;

private:
    std::string name_;
    std::vector<Observation> points_;
};

/// Date-aligned table of named columns: the regression design container.
class Frame {
public:
    Frame() = default;
    /// Throws SchemaError on duplicate names or length mismatch.
    Frame(std::vector<TradingDate> dates, std::vector<std::string> names, std::vector<std::vector<double>> columns);

    [[nodiscard]] std::size_t rows() const noexcept { return dates_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<TradingDate>& dates() const noexcept { return dates_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }

    [[nodiscard]] bool has(std::string_view name) const noexcept;
    /// Throws SchemaError if the column does not exist.
    [[nodiscard]] std::span<const double> column(std::string_view name) const;
    [[nodiscard]] std::span<const double> column(std::size_t index) const { return columns_.at(index); }
    [[nodiscard]] DailySeries series(std::string_view name) const;

    /// Reordered subset; throws SchemaError on unknown names.
    [[nodiscard]] Frame select(const std::vector<std::string>& names) const;
    [[nodiscard]] Frame between(std::optional<TradingDate> start, std::optional<TradingDate> end) const;

private:
    std::vector<TradingDate> dates_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

struct StandardizationParams {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> std;  ///< sample standard deviation (n - 1)
};

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// ln(x_t) - ln(x_{t-1}) over consecutive observations, dated at the later one.
DailySeries log_return(const DailySeries& s);

/// z_t - z_{t-1} over consecutive observations, dated at the later one.
DailySeries diff(const DailySeries& s);

/// diff() of a series quoted in percent, scaled to basis points.
DailySeries to_bps_change(const DailySeries& s);

/// Restricts all series to their common dates. Empty intersection gives an
/// empty frame (zero rows) rather than an error.
Frame inner_join(std::span<const DailySeries> series);
Frame inner_join(std::initializer_list<DailySeries> series);

std::pair<Frame, StandardizationParams> standardize(const Frame& f);
/// Inverse of standardize() for a frame whose columns match params.names.
Frame unstandardize(const Frame& f, const StandardizationParams& params);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

double mean(std::span<const double> x);
/// n - 1 denominator; requires at least two values.
double sample_variance(std::span<const double> x);
double sample_std(std::span<const double> x);
double sample_covariance(std::span<const double> x, std::span<const double> y);
/// Pearson correlation; nullopt when either input has zero variance.
std::optional<double> correlation(std::span<const double> x, std::span<const double> y);

}  // namespace didecomp
