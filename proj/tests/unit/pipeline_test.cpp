#include "didecomp/errors.hpp"
#include "didecomp/fixture.hpp"
#include "didecomp/log.hpp"
#include "didecomp/pipeline.hpp"
#include "didecomp/text_io.hpp"

#include "focus_server.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace didecomp;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

const std::vector<std::string> kRunFiles = {kMacroFactorFile, kCdsComponentsFile, kContributionsFile, kCumulativeFile,
                                            kModelsFile,      kReportFile,        kSvgFile};

HttpGet no_network() {
    return [](const std::string& url) -> HttpResponse {
        ADD_FAILURE() << "unexpected HTTP request to " << url;
        return {};
    };
}

PipelineConfig config_in(const std::filesystem::path& dir, const std::string& extra = "") {
    auto cfg_text = slurp(dir / kFixtureConfigFile) + extra;
    return resolve_config(ConfigStore::from_text(cfg_text, dir));
}

FixtureParams small_fixture(std::uint64_t seed = 1) {
    FixtureParams p;
    p.seed = seed;
    p.n = 400;
    return p;
}

}  // namespace

TEST(Fixture, SameSeedSameFiles) {
    TempDir a, b;
    generate_fixture(small_fixture(), a.path());
    generate_fixture(small_fixture(), b.path());
    for (const auto* f : {kFixtureMarketFile, kFixtureFocusFile, kFixtureFactorsFile, kFixtureTruthFile}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    TempDir c;
    generate_fixture(small_fixture(2), c.path());
    EXPECT_NE(slurp(a / kFixtureMarketFile), slurp(c / kFixtureMarketFile));
}

TEST(Fixture, InvalidTargets) {
    TempDir dir;
    auto p = small_fixture();
    p.n = 99;
    EXPECT_THROW(generate_fixture(p, dir.path()), ConfigError);
    p = small_fixture();
    p.r2 = 1.0;
    EXPECT_THROW(generate_fixture(p, dir.path()), ConfigError);
    p.r2 = 0.0;
    EXPECT_THROW(generate_fixture(p, dir.path()), ConfigError);
}

TEST(Fixture, VanishingNoiseGivesNearExactRecovery) {
    TempDir dir;
    auto p = small_fixture();
    p.n = 1000;
    p.r2 = 0.9999;
    generate_fixture(p, dir.path());
    const auto r = run_pipeline(config_in(dir.path()), no_network());
    const auto& coefs = r.report["regression"]["coefficients"];
    for (std::size_t i = 0; i < 4; ++i) {
        const double truth = p.betas[i];
        EXPECT_LT(std::fabs(coefs[i]["value"].get<double>() - truth) / std::fabs(truth), 1e-3) << i;
    }
}

TEST(Pipeline, ReportMatchesWrittenFiles) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path());
    const auto r = run_pipeline(cfg, no_network());
    ASSERT_EQ(r.files.size(), kRunFiles.size());
    for (const auto& f : kRunFiles) EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / f)) << f;
    EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / ".di-decomp.lock"));
    const auto lines = read_lines(cfg.output_dir / kContributionsFile);
    EXPECT_EQ(r.report["sample"]["observations"].get<std::size_t>(), lines.size() - 1);
    EXPECT_EQ(r.report["regression"]["observations"].get<std::size_t>(), 400u);
    const auto report = Json::parse(slurp(cfg.output_dir / kReportFile));
    EXPECT_EQ(report["software"]["version"], kSoftwareVersion);
    EXPECT_EQ(report["regression"]["coefficients"][1]["symbol"], "beta_M");
    const auto models = Json::parse(slurp(cfg.output_dir / kModelsFile));
    EXPECT_TRUE(models.contains("pls"));
    EXPECT_EQ(models["pls"]["weights"].size(), 21u);
    EXPECT_EQ(models["cds_split"]["gamma"].size(), 4u);
    EXPECT_NE(r.summary.find("DI5Y_change_cum = "), std::string::npos);
}

TEST(Pipeline, RerunIsByteIdentical) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path());
    run_pipeline(cfg, no_network());
    std::map<std::string, std::string> first;
    for (const auto& f : kRunFiles) first[f] = slurp(cfg.output_dir / f);
    std::filesystem::remove_all(cfg.output_dir);
    run_pipeline(cfg, no_network());
    for (const auto& f : kRunFiles) EXPECT_EQ(slurp(cfg.output_dir / f), first[f]) << f;
}

TEST(Pipeline, StagesResumeFromEmittedFiles) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path());
    const auto full = run_pipeline(cfg, no_network());
    const auto staged = config_in(dir.path(), "[output]\ndir = staged\n");
    run_build_factors(staged, no_network());
    run_split_cds(staged);
    const auto dec = run_decompose(staged);
    for (const auto* f : {kContributionsFile, kCumulativeFile, kSvgFile, kMacroFactorFile, kCdsComponentsFile}) {
        EXPECT_EQ(slurp(staged.output_dir / f), slurp(cfg.output_dir / f)) << f;
    }
    EXPECT_EQ(dec.report["regression"].dump(), full.report["regression"].dump());
}

TEST(Pipeline, DecomposeReadsConfiguredFactorFiles) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path());
    run_pipeline(cfg, no_network());
    std::filesystem::rename(cfg.output_dir / kMacroFactorFile, dir / "factor.csv");
    const auto other = config_in(dir.path(), "[data]\nmacro_factor_csv = factor.csv\ncds_components_csv = out/" +
                                                 std::string(kCdsComponentsFile) + "\n[output]\ndir = again\n");
    const auto r = run_decompose(other);
    EXPECT_EQ(slurp(other.output_dir / kContributionsFile), slurp(cfg.output_dir / kContributionsFile));
    EXPECT_EQ(r.observations, 400u);
}

TEST(Pipeline, EmptyJoinNamesTheStageAndLeavesNothing) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path(), "[sample]\nstart = 2030-01-01\nend = 2031-01-01\n");
    try {
        run_pipeline(cfg, no_network());
        FAIL() << "expected an error";
    } catch (const Error& e) {
        const std::string what = e.what();
        EXPECT_EQ(what.rfind("stage '", 0), 0u) << what;
        EXPECT_NE(what.find("0 rows"), std::string::npos) << what;
    }
    if (std::filesystem::exists(cfg.output_dir)) {
        for (const auto& f : kRunFiles) EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / f)) << f;
        EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / ".di-decomp.lock"));
    }
}

TEST(Pipeline, LockedOutputDirectoryIsRefused) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto cfg = config_in(dir.path());
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream(cfg.output_dir / ".di-decomp.lock") << "";
    EXPECT_THROW(run_pipeline(cfg, no_network()), ConfigError);
    EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / kReportFile));
}

TEST(Pipeline, MissingFocusSourceIsAConfigError) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    auto cfg = config_in(dir.path());
    cfg.focus_cache.reset();
    try {
        run_pipeline(cfg, no_network());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}

TEST(Pipeline, StrictMarketParsingSurfacesLoadStage) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    // Third line gets a comma-decimal DI5Y quote.
    auto text = slurp(dir / kFixtureMarketFile);
    const auto line3 = text.find('\n', text.find('\n') + 1) + 1;
    const auto cell = text.find(',', line3) + 1;
    text.replace(cell, text.find(',', cell) - cell, "\"12,5\"");
    write_text_file(dir / kFixtureMarketFile, text);
    const auto cfg = config_in(dir.path());
    try {
        run_pipeline(cfg, no_network());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Data);
        EXPECT_NE(std::string(e.what()).find("stage 'load'"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, FocusDiffOrderVariantsBothRun) {
    TempDir dir;
    generate_fixture(small_fixture(), dir.path());
    const auto before = run_pipeline(config_in(dir.path()), no_network());
    const auto after =
        run_pipeline(config_in(dir.path(), "[macro]\nfocus_diff_order = after_join\n[output]\ndir = after\n"),
                     no_network());
    // Every fixture date carries both market and Focus data, so the two orders agree.
    EXPECT_EQ(before.report["regression"].dump(), after.report["regression"].dump());
}

TEST(Pipeline, FetchFocusStageWritesPanelFromRecordedService) {
    testing_support::FocusServer server;
    TempDir dir;
    ConfigStore store;
    store.set("fetch.endpoint", server.endpoint());
    store.set("output.dir", dir.path().string());
    const auto r = run_fetch_focus(resolve_config(store), make_http_get());
    EXPECT_EQ(r.observations, 200u);
    const auto lines = read_lines(dir / kFocusPanelFile);
    EXPECT_EQ(lines[0], "date,indicator,reference_year,median");
    EXPECT_EQ(lines[1], "2004-01-02,IPCA,2004,6");
    EXPECT_TRUE(std::filesystem::exists(dir / kFocusLoadReportFile));
}
