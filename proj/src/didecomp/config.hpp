#pragma once

#include "didecomp/decomposition.hpp"
#include "didecomp/ingestion.hpp"
#include "didecomp/series.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace didecomp {

/// Raw `section.key -> value` settings. Layering: defaults < file <
/// environment (DI_DECOMP_<SECTION>_<KEY>) < explicit set() calls.
///
/// File grammar (one item per line, surrounding blanks ignored):
///
///     line    := comment | section | pair | <empty>
///     comment := ('#' | ';') <any text>
///     section := '[' name ']'
///     pair    := key '=' value
///
/// Keys must belong to a section and be known (see known_keys()). Relative
/// paths in a file resolve against the file's directory; relative paths from
/// the environment or set() resolve against the working directory.
class ConfigStore {
public:
    ConfigStore();

    static ConfigStore from_file(const std::filesystem::path& path);
    static ConfigStore from_text(std::string_view text, const std::filesystem::path& base_dir);

    /// Overrides known keys from DI_DECOMP_* environment variables.
    void apply_environment();
    /// Throws ConfigError for unknown keys.
    void set(const std::string& key, const std::string& value,
             const std::filesystem::path& base_dir = std::filesystem::current_path());

    [[nodiscard]] const std::string& get(const std::string& key) const;
    [[nodiscard]] std::filesystem::path base_dir(const std::string& key) const;
    /// Key/value pairs in key order, for echoing into reports.
    [[nodiscard]] std::map<std::string, std::string> values() const;

    static const std::vector<std::string>& known_keys();
    static std::string env_name(const std::string& key);

private:
    struct Entry {
        std::string value;
        std::filesystem::path base;
    };
    std::map<std::string, Entry> entries_;
};

enum class FocusDiffOrder {
    BeforeJoin,  ///< diff the full Focus history, then join with market dates
    AfterJoin,   ///< restrict Focus to market dates first, then diff
};

inline constexpr const char* kSurpriseDiffColumn = "SURPRISE_diff";

struct PipelineConfig {
    std::filesystem::path market_csv;
    std::optional<std::filesystem::path> focus_cache;
    std::optional<std::filesystem::path> macro_factor_csv;
    std::optional<std::filesystem::path> cds_components_csv;

    bool fetch_enabled = false;
    FocusFetchOptions fetch;

    std::optional<TradingDate> sample_start;
    std::optional<TradingDate> sample_end;
    std::optional<TradingDate> macro_start;
    std::optional<TradingDate> macro_end;
    /// Horizon columns and/or SURPRISE_diff entering the PLS block, in order.
    std::vector<std::string> macro_columns;
    FocusDiffOrder focus_diff_order = FocusDiffOrder::BeforeJoin;

    SignificanceThresholds significance;
    std::filesystem::path output_dir;
    bool strict = true;
    std::uint64_t seed = 1;

    std::map<std::string, std::string> echo;
};

/// Parses and validates every setting. Throws ConfigError on malformed
/// values, start >= end, unknown macro columns or disordered thresholds.
PipelineConfig resolve_config(const ConfigStore& store);

/// Creates the output directory if needed and checks it accepts files.
void ensure_output_dir(const std::filesystem::path& dir);

}  // namespace didecomp
