#pragma once

#include "didecomp/series.hpp"

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace didecomp {

// ---------------------------------------------------------------------------
// Focus expectations panel
// ---------------------------------------------------------------------------

enum class Indicator { IPCA, Selic, PIB, Primario, Nominal };

inline constexpr std::array<Indicator, 5> kAllIndicators = {Indicator::IPCA, Indicator::Selic, Indicator::PIB,
                                                            Indicator::Primario, Indicator::Nominal};

/// Short label used in column names ("IPCA", "Selic", "PIB", "Primario", "Nominal").
std::string_view indicator_label(Indicator indicator);
/// Value of the `Indicador` field in the BCB expectations service.
std::string_view indicator_api_name(Indicator indicator);
/// Accepts either the label or the API name.
std::optional<Indicator> parse_indicator(std::string_view text);

struct FocusRecord {
    TradingDate survey_date;
    Indicator indicator;
    int reference_year;
    double median;
};

/// Counters emitted as the load report. `warnings` carries the human-readable
/// detail of every dedup/drop/rejection.
struct LoadReport {
    std::size_t fetched = 0;
    std::size_t deduplicated = 0;
    std::size_t dropped = 0;
    std::size_t rejected = 0;
    std::vector<std::string> warnings;

    void merge(const LoadReport& other);
};

/// Date x indicator x reference-year medians, sorted by (date, indicator,
/// reference year) with unique keys and reference_year >= year(date).
class FocusPanel {
public:
    FocusPanel() = default;
    /// Throws DataError if the invariants do not hold.
    explicit FocusPanel(std::vector<FocusRecord> records);

    [[nodiscard]] const std::vector<FocusRecord>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] std::optional<double> find(const TradingDate& date, Indicator indicator, int reference_year) const;

private:
    std::vector<FocusRecord> records_;
};

/// Builds a panel from raw records in arrival order: duplicate keys keep the
/// last record (logged, counted as deduplicated); records whose reference
/// year precedes the survey year are counted as rejected.
FocusPanel build_focus_panel(const std::vector<FocusRecord>& raw, LoadReport& report);

inline constexpr const char* kDefaultFocusEndpoint =
    "https://olinda.bcb.gov.br/olinda/servico/Expectativas/versao/v1/odata/ExpectativasMercadoAnuais";

struct HttpResponse {
    int status = -1;  ///< -1 when no response was received
    std::string body;
    std::string error;
};

using HttpGet = std::function<HttpResponse(const std::string& url)>;

/// GET over cpp-httplib (http, and https when built with OpenSSL).
HttpGet make_http_get(std::chrono::seconds timeout = std::chrono::seconds{60});

struct FocusFetchOptions {
    std::string endpoint = kDefaultFocusEndpoint;
    std::vector<Indicator> indicators{kAllIndicators.begin(), kAllIndicators.end()};
    TradingDate start{2004, 1, 1};
    TradingDate end{2025, 12, 26};
    std::size_t page_size = 10000;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    bool concurrent = true;
};

/// First-page URL for one indicator: OData $filter on indicator and date
/// range, $orderby, $top/$skip paging, JSON format.
std::string focus_query_url(const FocusFetchOptions& options, Indicator indicator, std::size_t skip);

struct FocusPage {
    std::vector<FocusRecord> records;
    std::size_t raw_count = 0;           ///< entries in `value`, before filtering
    std::optional<std::string> next_link;
};

/// Parses one OData JSON page. Throws ParseError naming the offending record.
FocusPage parse_focus_payload(std::string_view body);

/// Fetches medians for every requested indicator, following next-links or
/// $skip paging until a short page. Transient failures (no response, 429,
/// 5xx) are retried with exponential backoff up to max_attempts.
/// Throws FetchError after the last failed attempt.
FocusPanel fetch_focus(const FocusFetchOptions& options, const HttpGet& get, LoadReport& report);

/// Focus panel cache: `date,indicator,reference_year,median`.
std::string focus_panel_csv(const FocusPanel& panel);
FocusPanel read_focus_panel_csv(const std::filesystem::path& path, bool strict, LoadReport& report);

// ---------------------------------------------------------------------------
// Horizon reshape
// ---------------------------------------------------------------------------

/// "<Indicator>_year", "<Indicator>_year_1", ... "<Indicator>_year_3" per indicator.
std::vector<std::string> horizon_column_names(std::span<const Indicator> indicators = kAllIndicators);

struct HorizonFrame {
    Frame frame;
    std::size_t dropped_dates = 0;
};

/// One row per survey date d holding, for each indicator, the expectations
/// for reference years year(d) .. year(d)+3. Dates missing any cell are
/// dropped and counted.
HorizonFrame reshape_horizons(const FocusPanel& panel, std::span<const Indicator> indicators = kAllIndicators);

// ---------------------------------------------------------------------------
// Market data
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 7> kMarketRoster = {"DI5Y", "CDS", "DXY", "CRB", "VIX", "UST10", "SURPRISE"};

struct MarketSchema {
    std::vector<std::string> columns{kMarketRoster.begin(), kMarketRoster.end()};
};

/// Named market series. Series may cover different dates; an empty CSV cell
/// means "no observation" for that series on that date.
class MarketDataset {
public:
    void add(DailySeries series);
    [[nodiscard]] bool has(std::string_view name) const;
    /// Throws SchemaError when absent.
    [[nodiscard]] const DailySeries& get(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> names() const;

private:
    std::map<std::string, DailySeries, std::less<>> series_;
};

/// Loads `date,<columns...>` with ISO dates and point-decimal values. Rows with
/// unparseable cells or repeated dates are rejected (counted, with line numbers
/// in the report); in strict mode any rejection is a ParseError. Output series
/// are sorted by date.
MarketDataset load_market_csv(const std::filesystem::path& path, const MarketSchema& schema, bool strict,
                              LoadReport& report);

/// Writes the listed series on the union of their dates, blank where missing,
/// values in shortest round-trip form.
std::string market_csv(const MarketDataset& data, const std::vector<std::string>& columns);

}  // namespace didecomp
