#include "didecomp/config.hpp"

#include "didecomp/errors.hpp"
#include "didecomp/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>

namespace didecomp {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"data.market_csv", "market.csv"},
        {"data.focus_cache", ""},
        {"data.macro_factor_csv", ""},
        {"data.cds_components_csv", ""},
        {"fetch.enabled", "false"},
        {"fetch.endpoint", kDefaultFocusEndpoint},
        {"fetch.indicators", "IPCA,Selic,PIB,Primario,Nominal"},
        {"fetch.start", "2004-01-01"},
        {"fetch.end", "2025-12-26"},
        {"fetch.page_size", "10000"},
        {"fetch.max_attempts", "3"},
        {"fetch.backoff_ms", "500"},
        {"fetch.concurrent", "true"},
        {"sample.start", "2015-01-13"},
        {"sample.end", "2025-12-12"},
        {"macro.start", ""},
        {"macro.end", ""},
        {"macro.columns", "all"},
        {"macro.focus_diff_order", "before_join"},
        {"significance.highly", "0.001"},
        {"significance.significant", "0.01"},
        {"significance.weak", "0.05"},
        {"output.dir", "out"},
        {"parse.strict", "true"},
        {"fixture.seed", "1"},
    };
    return d;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    for (auto cell : split_csv_line(text)) {
        auto t = trim(cell);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    std::string lower = v;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
    if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
    auto x = parse_double_strict(v);
    if (!x) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return *x;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::optional<TradingDate> parse_optional_date(const std::string& key, const std::string& v) {
    if (trim(v).empty()) return std::nullopt;
    auto d = TradingDate::try_parse(trim(v));
    if (!d) throw ConfigError(key + ": expected YYYY-MM-DD, got '" + v + "'");
    return d;
}

}  // namespace

ConfigStore::ConfigStore() {
    for (const auto& [k, v] : defaults()) entries_[k] = {v, std::filesystem::current_path()};
}

const std::vector<std::string>& ConfigStore::known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [key, v] : defaults()) k.push_back(key);
        return k;
    }();
    return keys;
}

std::string ConfigStore::env_name(const std::string& key) {
    std::string out = "DI_DECOMP_";
    for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

ConfigStore ConfigStore::from_text(std::string_view text, const std::filesystem::path& base_dir) {
    ConfigStore store;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        const std::string where = "config line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of a [section]");
        const auto key = section + "." + std::string(trim(line.substr(0, eq)));
        try {
            store.set(key, std::string(trim(line.substr(eq + 1))), base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return store;
}

ConfigStore ConfigStore::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto base = std::filesystem::absolute(path).parent_path();
    auto store = from_text(text, base);
    store.apply_environment();
    return store;
}

void ConfigStore::apply_environment() {
    for (const auto& key : known_keys()) {
        if (const char* v = std::getenv(env_name(key).c_str())) set(key, v);
    }
}

void ConfigStore::set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
    if (!defaults().count(key)) throw ConfigError("unknown config key '" + key + "'");
    entries_[key] = {value, base_dir};
}

const std::string& ConfigStore::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second.value;
}

std::filesystem::path ConfigStore::base_dir(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second.base;
}

std::map<std::string, std::string> ConfigStore::values() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.value;
    return out;
}

PipelineConfig resolve_config(const ConfigStore& store) {
    PipelineConfig cfg;
    auto path_of = [&](const std::string& key) -> std::optional<std::filesystem::path> {
        const auto& v = store.get(key);
        if (trim(v).empty()) return std::nullopt;
        std::filesystem::path p(std::string(trim(v)));
        return p.is_absolute() ? p : store.base_dir(key) / p;
    };

    auto market = path_of("data.market_csv");
    if (!market) throw ConfigError("data.market_csv must be set");
    cfg.market_csv = *market;
    cfg.focus_cache = path_of("data.focus_cache");
    cfg.macro_factor_csv = path_of("data.macro_factor_csv");
    cfg.cds_components_csv = path_of("data.cds_components_csv");

    cfg.fetch_enabled = parse_bool("fetch.enabled", store.get("fetch.enabled"));
    cfg.fetch.endpoint = std::string(trim(store.get("fetch.endpoint")));
    cfg.fetch.indicators.clear();
    for (const auto& name : split_list(store.get("fetch.indicators"))) {
        auto ind = parse_indicator(name);
        if (!ind) throw ConfigError("fetch.indicators: unknown indicator '" + name + "'");
        cfg.fetch.indicators.push_back(*ind);
    }
    if (cfg.fetch.indicators.empty()) throw ConfigError("fetch.indicators is empty");
    auto fs = parse_optional_date("fetch.start", store.get("fetch.start"));
    auto fe = parse_optional_date("fetch.end", store.get("fetch.end"));
    if (!fs || !fe) throw ConfigError("fetch.start and fetch.end must be set");
    if (!(*fs < *fe)) throw ConfigError("fetch.start must precede fetch.end");
    cfg.fetch.start = *fs;
    cfg.fetch.end = *fe;
    cfg.fetch.page_size = parse_count("fetch.page_size", store.get("fetch.page_size"));
    if (cfg.fetch.page_size == 0) throw ConfigError("fetch.page_size must be positive");
    cfg.fetch.max_attempts = static_cast<int>(parse_count("fetch.max_attempts", store.get("fetch.max_attempts")));
    if (cfg.fetch.max_attempts < 1) throw ConfigError("fetch.max_attempts must be at least 1");
    cfg.fetch.initial_backoff =
        std::chrono::milliseconds(parse_count("fetch.backoff_ms", store.get("fetch.backoff_ms")));
    cfg.fetch.concurrent = parse_bool("fetch.concurrent", store.get("fetch.concurrent"));

    cfg.sample_start = parse_optional_date("sample.start", store.get("sample.start"));
    cfg.sample_end = parse_optional_date("sample.end", store.get("sample.end"));
    if (cfg.sample_start && cfg.sample_end && !(*cfg.sample_start < *cfg.sample_end)) {
        throw ConfigError("sample.start must precede sample.end");
    }
    cfg.macro_start = parse_optional_date("macro.start", store.get("macro.start"));
    cfg.macro_end = parse_optional_date("macro.end", store.get("macro.end"));
    if (cfg.macro_start && cfg.macro_end && !(*cfg.macro_start < *cfg.macro_end)) {
        throw ConfigError("macro.start must precede macro.end");
    }

    std::vector<std::string> allowed = horizon_column_names(cfg.fetch.indicators);
    allowed.emplace_back(kSurpriseDiffColumn);
    const auto& columns = store.get("macro.columns");
    if (trim(columns) == "all") {
        cfg.macro_columns = allowed;
    } else {
        cfg.macro_columns = split_list(columns);
        if (cfg.macro_columns.empty()) throw ConfigError("macro.columns is empty");
        std::set<std::string> seen;
        for (const auto& c : cfg.macro_columns) {
            if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
                throw ConfigError("macro.columns: '" + c + "' is not a horizon column or " + kSurpriseDiffColumn);
            }
            if (!seen.insert(c).second) throw ConfigError("macro.columns: '" + c + "' listed twice");
        }
    }
    const auto order = std::string(trim(store.get("macro.focus_diff_order")));
    if (order == "before_join") {
        cfg.focus_diff_order = FocusDiffOrder::BeforeJoin;
    } else if (order == "after_join") {
        cfg.focus_diff_order = FocusDiffOrder::AfterJoin;
    } else {
        throw ConfigError("macro.focus_diff_order must be before_join or after_join");
    }

    cfg.significance.highly = parse_real("significance.highly", store.get("significance.highly"));
    cfg.significance.significant = parse_real("significance.significant", store.get("significance.significant"));
    cfg.significance.weak = parse_real("significance.weak", store.get("significance.weak"));
    const auto& s = cfg.significance;
    if (!(0.0 < s.highly && s.highly <= s.significant && s.significant <= s.weak && s.weak < 1.0)) {
        throw ConfigError("significance thresholds must satisfy 0 < highly <= significant <= weak < 1");
    }

    auto out = path_of("output.dir");
    if (!out) throw ConfigError("output.dir must be set");
    cfg.output_dir = *out;
    cfg.strict = parse_bool("parse.strict", store.get("parse.strict"));
    cfg.seed = parse_count("fixture.seed", store.get("fixture.seed"));
    cfg.echo = store.values();
    return cfg;
}

void ensure_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw ConfigError("output directory '" + dir.string() + "' cannot be created");
    }
    const auto probe = dir / ".di-decomp.probe";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("output directory '" + dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace didecomp
