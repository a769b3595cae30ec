#include "didecomp/ingestion.hpp"

#include "didecomp/errors.hpp"
#include "didecomp/log.hpp"
#include "didecomp/text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <set>
#include <thread>
#include <tuple>

namespace didecomp {

namespace {

using json = nlohmann::json;

auto record_key(const FocusRecord& r) {
    return std::make_tuple(r.survey_date, static_cast<int>(r.indicator), r.reference_year);
}

std::string describe_key(const FocusRecord& r) {
    return r.survey_date.iso() + "/" + std::string(indicator_label(r.indicator)) + "/" +
           std::to_string(r.reference_year);
}

std::string percent_encode(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
            c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

bool is_transient(int status) { return status < 0 || status == 429 || status >= 500; }

HttpResponse get_with_retry(const HttpGet& get, const std::string& url, const FocusFetchOptions& options) {
    auto backoff = options.initial_backoff;
    const int attempts = std::max(1, options.max_attempts);
    HttpResponse last;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        last = get(url);
        if (last.status >= 200 && last.status < 300) return last;
        if (!is_transient(last.status)) break;
        if (attempt < attempts) {
            log_warning("focus fetch attempt " + std::to_string(attempt) + " failed (" +
                        (last.status < 0 ? last.error : "HTTP " + std::to_string(last.status)) + "), retrying");
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    std::string detail = last.status < 0 ? "no response: " + last.error : "HTTP status " + std::to_string(last.status);
    throw FetchError("focus fetch failed for " + url + " (" + detail + ")", url, last.status);
}

std::string resolve_link(const std::string& endpoint, const std::string& link) {
    if (link.find("://") != std::string::npos) return link;
    const auto scheme = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    const std::string origin = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    if (!link.empty() && link.front() == '/') return origin + link;
    const auto last_slash = endpoint.rfind('/');
    return endpoint.substr(0, last_slash + 1) + link;
}

std::vector<FocusRecord> fetch_indicator(const FocusFetchOptions& options, Indicator indicator, const HttpGet& get,
                                         std::size_t& raw_total) {
    std::vector<FocusRecord> records;
    std::size_t skip = 0;
    std::string url = focus_query_url(options, indicator, skip);
    constexpr std::size_t kMaxPages = 100000;
    for (std::size_t page_no = 0; page_no < kMaxPages; ++page_no) {
        const auto response = get_with_retry(get, url, options);
        FocusPage page;
        try {
            page = parse_focus_payload(response.body);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (from " + url + ")");
        }
        raw_total += page.raw_count;
        records.insert(records.end(), page.records.begin(), page.records.end());
        if (page.next_link) {
            url = resolve_link(options.endpoint, *page.next_link);
            continue;
        }
        if (page.raw_count < options.page_size || page.raw_count == 0) return records;
        skip += options.page_size;
        url = focus_query_url(options, indicator, skip);
    }
    throw FetchError("focus fetch exceeded the page limit", url, 200);
}

}  // namespace

// ---------------------------------------------------------------------------
// Indicators
// ---------------------------------------------------------------------------

std::string_view indicator_label(Indicator indicator) {
    switch (indicator) {
        case Indicator::IPCA: return "IPCA";
        case Indicator::Selic: return "Selic";
        case Indicator::PIB: return "PIB";
        case Indicator::Primario: return "Primario";
        case Indicator::Nominal: return "Nominal";
    }
    return "?";
}

std::string_view indicator_api_name(Indicator indicator) {
    switch (indicator) {
        case Indicator::IPCA: return "IPCA";
        case Indicator::Selic: return "Selic";
        case Indicator::PIB: return "PIB Total";
        case Indicator::Primario: return "Resultado prim\xC3\xA1rio";
        case Indicator::Nominal: return "Resultado nominal";
    }
    return "?";
}

std::optional<Indicator> parse_indicator(std::string_view text) {
    for (auto ind : kAllIndicators) {
        if (text == indicator_label(ind) || text == indicator_api_name(ind)) return ind;
    }
    return std::nullopt;
}

void LoadReport::merge(const LoadReport& other) {
    fetched += other.fetched;
    deduplicated += other.deduplicated;
    dropped += other.dropped;
    rejected += other.rejected;
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

// ---------------------------------------------------------------------------
// FocusPanel
// ---------------------------------------------------------------------------

FocusPanel::FocusPanel(std::vector<FocusRecord> records) : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(),
              [](const FocusRecord& a, const FocusRecord& b) { return record_key(a) < record_key(b); });
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.reference_year < r.survey_date.year()) {
            throw DataError("focus record " + describe_key(r) + " has a reference year before the survey year");
        }
        if (!std::isfinite(r.median)) throw DataError("focus record " + describe_key(r) + " has a non-finite median");
        if (i > 0 && record_key(records_[i - 1]) == record_key(r)) {
            throw DataError("duplicate focus record " + describe_key(r));
        }
    }
}

std::optional<double> FocusPanel::find(const TradingDate& date, Indicator indicator, int reference_year) const {
    const auto key = std::make_tuple(date, static_cast<int>(indicator), reference_year);
    auto it = std::lower_bound(records_.begin(), records_.end(), key,
                               [](const FocusRecord& r, const auto& k) { return record_key(r) < k; });
    if (it == records_.end() || record_key(*it) != key) return std::nullopt;
    return it->median;
}

FocusPanel build_focus_panel(const std::vector<FocusRecord>& raw, LoadReport& report) {
    std::vector<FocusRecord> kept;
    kept.reserve(raw.size());
    for (const auto& r : raw) {
        if (r.reference_year < r.survey_date.year()) {
            ++report.rejected;
            report.warnings.push_back("rejected " + describe_key(r) + ": reference year precedes survey year");
            continue;
        }
        kept.push_back(r);
    }
    // Keep the last occurrence of each key: walk backwards, first seen wins.
    std::set<std::tuple<TradingDate, int, int>> seen;
    std::vector<FocusRecord> unique;
    unique.reserve(kept.size());
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        if (!seen.insert(record_key(*it)).second) {
            ++report.deduplicated;
            const std::string msg = "duplicate focus record " + describe_key(*it) + ", keeping the last one";
            report.warnings.push_back(msg);
            log_warning(msg);
            continue;
        }
        unique.push_back(*it);
    }
    return FocusPanel(std::move(unique));
}

// ---------------------------------------------------------------------------
// OData client
// ---------------------------------------------------------------------------

std::string focus_query_url(const FocusFetchOptions& options, Indicator indicator, std::size_t skip) {
    const std::string filter = "Indicador eq '" + std::string(indicator_api_name(indicator)) + "' and Data ge '" +
                               options.start.iso() + "' and Data le '" + options.end.iso() + "' and baseCalculo eq 0";
    std::string url = options.endpoint;
    url += url.find('?') == std::string::npos ? '?' : '&';
    url += "$filter=" + percent_encode(filter);
    url += "&$orderby=" + percent_encode("Data asc,DataReferencia asc");
    url += "&$select=" + percent_encode("Indicador,Data,DataReferencia,Mediana,baseCalculo");
    url += "&$top=" + std::to_string(options.page_size);
    url += "&$skip=" + std::to_string(skip);
    url += "&$format=json";
    return url;
}

FocusPage parse_focus_payload(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("focus payload is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("value") || !doc["value"].is_array()) {
        throw ParseError("focus payload has no 'value' array");
    }
    FocusPage page;
    const auto& values = doc["value"];
    page.raw_count = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& rec = values[i];
        auto fail = [&](const std::string& why) {
            throw ParseError("malformed focus record #" + std::to_string(i) + " (" + why + "): " + rec.dump());
        };
        if (!rec.is_object()) fail("not an object");
        if (rec.contains("baseCalculo") && rec["baseCalculo"].is_number() && rec["baseCalculo"].get<double>() != 0.0) {
            continue;
        }
        if (!rec.contains("Indicador") || !rec["Indicador"].is_string()) fail("missing Indicador");
        const auto indicator = parse_indicator(rec["Indicador"].get<std::string>());
        if (!indicator) fail("unknown indicator");
        if (!rec.contains("Data") || !rec["Data"].is_string()) fail("missing Data");
        const auto date = TradingDate::try_parse(rec["Data"].get<std::string>());
        if (!date) fail("bad Data");
        int ref_year = 0;
        if (!rec.contains("DataReferencia")) fail("missing DataReferencia");
        const auto& ref = rec["DataReferencia"];
        if (ref.is_number_integer()) {
            ref_year = ref.get<int>();
        } else if (ref.is_string()) {
            const auto s = ref.get<std::string>();
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), ref_year);
            if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad DataReferencia");
        } else {
            fail("bad DataReferencia");
        }
        if (!rec.contains("Mediana") || !rec["Mediana"].is_number()) fail("missing Mediana");
        page.records.push_back({*date, *indicator, ref_year, rec["Mediana"].get<double>()});
    }
    if (doc.contains("@odata.nextLink") && doc["@odata.nextLink"].is_string()) {
        page.next_link = doc["@odata.nextLink"].get<std::string>();
    }
    return page;
}

FocusPanel fetch_focus(const FocusFetchOptions& options, const HttpGet& get, LoadReport& report) {
    if (options.end < options.start) throw ConfigError("focus fetch: start date is after end date");
    if (options.page_size == 0) throw ConfigError("focus fetch: page size must be positive");

    const std::size_t n = options.indicators.size();
    std::vector<std::vector<FocusRecord>> per_indicator(n);
    std::vector<std::size_t> raw_counts(n, 0);
    if (options.concurrent && n > 1) {
        std::vector<std::future<std::vector<FocusRecord>>> jobs;
        jobs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            jobs.push_back(std::async(std::launch::async, [&, i] {
                return fetch_indicator(options, options.indicators[i], get, raw_counts[i]);
            }));
        }
        for (std::size_t i = 0; i < n; ++i) per_indicator[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            per_indicator[i] = fetch_indicator(options, options.indicators[i], get, raw_counts[i]);
        }
    }

    // Merge in request order; FocusPanel sorts by key, so arrival order only
    // matters for which duplicate survives.
    std::vector<FocusRecord> all;
    for (std::size_t i = 0; i < n; ++i) {
        report.fetched += per_indicator[i].size();
        all.insert(all.end(), per_indicator[i].begin(), per_indicator[i].end());
    }
    return build_focus_panel(all, report);
}

// ---------------------------------------------------------------------------
// Panel cache CSV
// ---------------------------------------------------------------------------

std::string focus_panel_csv(const FocusPanel& panel) {
    std::string out = "date,indicator,reference_year,median\n";
    for (const auto& r : panel.records()) {
        out += r.survey_date.iso();
        out += ',';
        out += indicator_label(r.indicator);
        out += ',';
        out += std::to_string(r.reference_year);
        out += ',';
        out += format_shortest(r.median);
        out += '\n';
    }
    return out;
}

FocusPanel read_focus_panel_csv(const std::filesystem::path& path, bool strict, LoadReport& report) {
    const auto lines = read_lines(path);
    if (lines.empty() || trim(lines[0]) != "date,indicator,reference_year,median") {
        throw SchemaError("'" + path.string() + "': expected header date,indicator,reference_year,median");
    }
    std::vector<FocusRecord> raw;
    std::vector<std::string> bad;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto cells = split_csv_line(lines[ln]);
        const std::string where = path.filename().string() + " line " + std::to_string(ln + 1);
        if (cells.size() != 4) {
            bad.push_back(where + ": expected 4 cells");
            continue;
        }
        const auto date = TradingDate::try_parse(trim(cells[0]));
        const auto ind = parse_indicator(trim(cells[1]));
        int year = 0;
        const auto ys = trim(cells[2]);
        auto [ptr, ec] = std::from_chars(ys.data(), ys.data() + ys.size(), year);
        const bool year_ok = ec == std::errc{} && ptr == ys.data() + ys.size();
        const auto median = parse_double_strict(cells[3]);
        if (!date || !ind || !year_ok || !median) {
            bad.push_back(where + ": unparseable cell");
            continue;
        }
        raw.push_back({*date, *ind, year, *median});
    }
    if (!bad.empty()) {
        if (strict) throw ParseError("rejected rows in focus panel: " + bad.front() +
                                     (bad.size() > 1 ? " (and " + std::to_string(bad.size() - 1) + " more)" : ""));
        report.rejected += bad.size();
        report.warnings.insert(report.warnings.end(), bad.begin(), bad.end());
    }
    report.fetched += raw.size();
    return build_focus_panel(raw, report);
}

// ---------------------------------------------------------------------------
// Horizons
// ---------------------------------------------------------------------------

std::vector<std::string> horizon_column_names(std::span<const Indicator> indicators) {
    std::vector<std::string> names;
    for (auto ind : indicators) {
        const std::string base = std::string(indicator_label(ind)) + "_year";
        names.push_back(base);
        for (int k = 1; k <= 3; ++k) names.push_back(base + "_" + std::to_string(k));
    }
    return names;
}

HorizonFrame reshape_horizons(const FocusPanel& panel, std::span<const Indicator> indicators) {
    if (panel.empty()) throw InsufficientDataError("reshape_horizons: empty focus panel");
    std::vector<TradingDate> survey_dates;
    for (const auto& r : panel.records()) {
        if (survey_dates.empty() || !(survey_dates.back() == r.survey_date)) survey_dates.push_back(r.survey_date);
    }

    const auto names = horizon_column_names(indicators);
    HorizonFrame out;
    std::vector<TradingDate> dates;
    std::vector<std::vector<double>> cols(names.size());
    std::vector<double> row(names.size());
    for (const auto& d : survey_dates) {
        bool complete = true;
        std::size_t c = 0;
        for (auto ind : indicators) {
            for (int k = 0; k <= 3 && complete; ++k) {
                const auto v = panel.find(d, ind, d.year() + k);
                if (!v) {
                    complete = false;
                    break;
                }
                row[c++] = *v;
            }
            if (!complete) break;
        }
        if (!complete) {
            ++out.dropped_dates;
            continue;
        }
        dates.push_back(d);
        for (std::size_t j = 0; j < row.size(); ++j) cols[j].push_back(row[j]);
    }
    out.frame = Frame(std::move(dates), names, std::move(cols));
    return out;
}

// ---------------------------------------------------------------------------
// Market data
// ---------------------------------------------------------------------------

void MarketDataset::add(DailySeries series) {
    auto name = series.name();
    series_.insert_or_assign(std::move(name), std::move(series));
}

bool MarketDataset::has(std::string_view name) const { return series_.find(name) != series_.end(); }

const DailySeries& MarketDataset::get(std::string_view name) const {
    auto it = series_.find(name);
    if (it == series_.end()) throw SchemaError("market dataset has no series '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> MarketDataset::names() const {
    std::vector<std::string> out;
    for (const auto& [name, s] : series_) out.push_back(name);
    return out;
}

MarketDataset load_market_csv(const std::filesystem::path& path, const MarketSchema& schema, bool strict,
                              LoadReport& report) {
    if (!std::filesystem::exists(path)) throw DataError("market CSV '" + path.string() + "' does not exist");
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError("market CSV '" + path.string() + "' is empty");

    const auto header = split_csv_line(lines[0]);
    if (header.empty() || trim(header[0]) != "date") {
        throw SchemaError("market CSV '" + path.string() + "': first header column must be 'date'");
    }
    std::vector<std::size_t> index(schema.columns.size());
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        std::optional<std::size_t> found;
        for (std::size_t h = 1; h < header.size(); ++h) {
            if (trim(header[h]) == schema.columns[j]) {
                if (found) throw SchemaError("market CSV header repeats column '" + schema.columns[j] + "'");
                found = h;
            }
        }
        if (!found) throw SchemaError("market CSV '" + path.string() + "' lacks column '" + schema.columns[j] + "'");
        index[j] = *found;
    }

    struct Row {
        TradingDate date;
        std::vector<std::optional<double>> values;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::vector<std::string> bad;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto cells = split_csv_line(lines[ln]);
        const std::string where = "line " + std::to_string(ln + 1);
        if (cells.size() != header.size()) {
            bad.push_back(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                          std::to_string(cells.size()));
            continue;
        }
        const auto date = TradingDate::try_parse(trim(cells[0]));
        if (!date) {
            bad.push_back(where + ": bad date '" + std::string(cells[0]) + "'");
            continue;
        }
        Row row{*date, {}, ln + 1};
        bool ok = true;
        for (std::size_t j = 0; j < index.size(); ++j) {
            const auto cell = trim(cells[index[j]]);
            if (cell.empty()) {
                row.values.emplace_back(std::nullopt);
                continue;
            }
            const auto v = parse_double_strict(cell);
            if (!v) {
                bad.push_back(where + ": cell '" + std::string(cell) + "' in column " + schema.columns[j] +
                              " is not a point-decimal number");
                ok = false;
                break;
            }
            row.values.emplace_back(*v);
        }
        if (ok) rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    std::vector<Row> unique_rows;
    for (auto& r : rows) {
        if (!unique_rows.empty() && unique_rows.back().date == r.date) {
            bad.push_back("line " + std::to_string(r.line) + ": repeated date " + r.date.iso());
            continue;
        }
        unique_rows.push_back(std::move(r));
    }

    if (!bad.empty()) {
        if (strict) {
            throw ParseError("market CSV '" + path.string() + "' has " + std::to_string(bad.size()) +
                             " rejected row(s); first: " + bad.front());
        }
        report.rejected += bad.size();
        for (const auto& b : bad) log_warning("market CSV " + b);
        report.warnings.insert(report.warnings.end(), bad.begin(), bad.end());
    }

    MarketDataset out;
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        std::vector<Observation> pts;
        for (const auto& r : unique_rows) {
            if (r.values[j]) pts.push_back({r.date, *r.values[j]});
        }
        out.add(DailySeries(schema.columns[j], std::move(pts)));
    }
    report.fetched += unique_rows.size();
    return out;
}

std::string market_csv(const MarketDataset& data, const std::vector<std::string>& columns) {
    std::set<TradingDate> dates;
    std::vector<std::map<TradingDate, double>> lookup;
    for (const auto& c : columns) {
        std::map<TradingDate, double> m;
        for (const auto& p : data.get(c).points()) {
            dates.insert(p.date);
            m.emplace(p.date, p.value);
        }
        lookup.push_back(std::move(m));
    }
    std::string out = "date";
    for (const auto& c : columns) out += "," + c;
    out += '\n';
    for (const auto& d : dates) {
        out += d.iso();
        for (const auto& m : lookup) {
            out += ',';
            if (auto it = m.find(d); it != m.end()) out += format_shortest(it->second);
        }
        out += '\n';
    }
    return out;
}

}  // namespace didecomp
