#include "didecomp/config.hpp"
#include "didecomp/errors.hpp"
#include "didecomp/text_io.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace didecomp;
using testing_support::TempDir;

namespace {

class ScopedEnv {
public:
    ScopedEnv(std::string name, const std::string& value) : name_(std::move(name)) {
        ::setenv(name_.c_str(), value.c_str(), 1);
    }
    ~ScopedEnv() { ::unsetenv(name_.c_str()); }

private:
    std::string name_;
};

}  // namespace

TEST(Config, DefaultsResolve) {
    const auto cfg = resolve_config(ConfigStore());
    EXPECT_EQ(cfg.sample_start->iso(), "2015-01-13");
    EXPECT_EQ(cfg.sample_end->iso(), "2025-12-12");
    EXPECT_EQ(cfg.macro_columns.size(), 21u);
    EXPECT_EQ(cfg.macro_columns.back(), kSurpriseDiffColumn);
    EXPECT_TRUE(cfg.strict);
    EXPECT_FALSE(cfg.fetch_enabled);
    EXPECT_EQ(cfg.fetch.endpoint, kDefaultFocusEndpoint);
}

TEST(Config, GrammarSectionsCommentsAndPaths) {
    const auto store = ConfigStore::from_text(
        "# comment\n; another\n\n[data]\n  market_csv = prices/m.csv  \n[sample]\nstart=2016-01-04\r\n"
        "[macro]\ncolumns = IPCA_year, SURPRISE_diff\n",
        "/base");
    const auto cfg = resolve_config(store);
    EXPECT_EQ(cfg.market_csv, std::filesystem::path("/base/prices/m.csv"));
    EXPECT_EQ(cfg.sample_start->iso(), "2016-01-04");
    EXPECT_EQ(cfg.macro_columns, (std::vector<std::string>{"IPCA_year", "SURPRISE_diff"}));
}

TEST(Config, GrammarErrorsCarryLineNumbers) {
    try {
        ConfigStore::from_text("[data]\nmarket_csv = a\nnonsense\n", "/");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(ConfigStore::from_text("market_csv = a\n", "/"), ConfigError);
    EXPECT_THROW(ConfigStore::from_text("[data\n", "/"), ConfigError);
    EXPECT_THROW(ConfigStore::from_text("[data]\nbogus = 1\n", "/"), ConfigError);
}

TEST(Config, LayeringFileThenEnvironmentThenExplicit) {
    TempDir dir;
    write_text_file(dir / "c.ini", "[sample]\nstart = 2016-01-04\nend = 2020-01-02\n[output]\ndir = o\n");
    ScopedEnv env(ConfigStore::env_name("sample.start"), "2017-01-02");
    EXPECT_EQ(ConfigStore::env_name("sample.start"), "DI_DECOMP_SAMPLE_START");
    auto store = ConfigStore::from_file(dir / "c.ini");
    EXPECT_EQ(store.get("sample.start"), "2017-01-02");
    EXPECT_EQ(store.get("sample.end"), "2020-01-02");
    store.set("sample.start", "2018-01-02");
    const auto cfg = resolve_config(store);
    EXPECT_EQ(cfg.sample_start->iso(), "2018-01-02");
    EXPECT_EQ(cfg.output_dir, dir.path() / "o");
}

TEST(Config, ValidationFailures) {
    auto bad = [](const std::string& key, const std::string& value) {
        ConfigStore s;
        s.set(key, value);
        EXPECT_THROW(resolve_config(s), ConfigError) << key << "=" << value;
    };
    bad("sample.start", "2030-01-01");
    bad("sample.start", "13/01/2015");
    bad("macro.columns", "IPCA_year,Cambio_year");
    bad("macro.columns", "IPCA_year,IPCA_year");
    bad("significance.highly", "0.2");
    bad("parse.strict", "maybe");
    bad("fetch.page_size", "0");
    bad("fetch.indicators", "IPCA,Cambio");
    bad("macro.focus_diff_order", "sideways");
    ConfigStore s;
    EXPECT_THROW(s.set("nope.key", "1"), ConfigError);
}

TEST(Config, CustomThresholds) {
    ConfigStore s;
    s.set("significance.weak", "0.1");
    const auto cfg = resolve_config(s);
    EXPECT_EQ(cfg.significance.label(0.07), "Weak");
}

TEST(OutputDir, CreatedAndChecked) {
    TempDir dir;
    ensure_output_dir(dir / "a/b");
    EXPECT_TRUE(std::filesystem::is_directory(dir / "a/b"));
    write_text_file(dir / "file", "x");
    EXPECT_THROW(ensure_output_dir(dir / "file"), ConfigError);
}
