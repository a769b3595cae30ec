// Exercises the shared library strictly through its C header, and the CLI
// binary through its exit codes.

#include <didecomp/didecomp.h>

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

using testing_support::slurp;
using testing_support::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DIDECOMP_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

dd_result* make_fixture(const TempDir& dir, size_t n = 300) {
    dd_fixture_params p;
    dd_fixture_defaults(&p);
    p.n = n;
    dd_result* r = nullptr;
    EXPECT_EQ(dd_generate_fixture(&p, dir.path().c_str(), &r), DD_OK) << dd_last_error();
    return r;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
    EXPECT_STREQ(dd_version(), "1.0.0");
    EXPECT_STREQ(dd_status_name(DD_ERR_DATA), "data error");
}

TEST(CApi, NullArgumentsAreRejected) {
    EXPECT_EQ(dd_config_create(nullptr), DD_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(dd_run(nullptr, nullptr), DD_ERR_INVALID_ARGUMENT);
    EXPECT_STRNE(dd_last_error(), "");
    dd_config_free(nullptr);
    dd_result_free(nullptr);
    dd_ols_free(nullptr);
}

TEST(CApi, ConfigSetGetAndUnknownKey) {
    dd_config* c = nullptr;
    ASSERT_EQ(dd_config_create(&c), DD_OK);
    ASSERT_EQ(dd_config_set(c, "sample.start", "2016-01-04"), DD_OK);
    const char* v = nullptr;
    ASSERT_EQ(dd_config_get(c, "sample.start", &v), DD_OK);
    EXPECT_STREQ(v, "2016-01-04");
    EXPECT_EQ(dd_config_set(c, "no.such", "1"), DD_ERR_CONFIG);
    EXPECT_NE(std::string(dd_last_error()).find("no.such"), std::string::npos);
    dd_config_free(c);
    EXPECT_EQ(dd_config_load("/nonexistent.ini", &c), DD_ERR_CONFIG);
    EXPECT_EQ(c, nullptr);
}

TEST(CApi, OlsMatchesKnownLine) {
    const double y[] = {1, 3, 5, 7, 9.5};
    const double x[] = {0, 1, 2, 3, 4};
    dd_ols* fit = nullptr;
    ASSERT_EQ(dd_ols_fit(y, x, 5, 1, 1, &fit), DD_OK);
    ASSERT_EQ(dd_ols_coefficient_count(fit), 2u);
    double coef[2], se[2], t[2], p[2];
    ASSERT_EQ(dd_ols_coefficients(fit, coef, se, t, p), DD_OK);
    EXPECT_NEAR(coef[0], 0.9, 1e-12);
    EXPECT_NEAR(coef[1], 2.1, 1e-12);
    EXPECT_GT(dd_ols_r_squared(fit), 0.99);
    dd_ols_free(fit);
    const double dup[] = {0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
    EXPECT_EQ(dd_ols_fit(y, dup, 5, 2, 1, &fit), DD_ERR_NUMERICAL);
}

TEST(CApi, StudentT) {
    double p = 0.0;
    ASSERT_EQ(dd_student_t_p(1.0, 1, &p), DD_OK);
    EXPECT_NEAR(p, 0.5, 1e-14);
    EXPECT_EQ(dd_student_t_p(1.0, 0, &p), DD_ERR_DATA);
}

TEST(CApi, FixtureThenRun) {
    TempDir dir;
    dd_result* fx = make_fixture(dir);
    ASSERT_NE(fx, nullptr);
    EXPECT_EQ(dd_result_file_count(fx), 5u);
    dd_result_free(fx);

    dd_config* c = nullptr;
    ASSERT_EQ(dd_config_load((dir / "config.ini").c_str(), &c), DD_OK) << dd_last_error();
    dd_result* r = nullptr;
    ASSERT_EQ(dd_run(c, &r), DD_OK) << dd_last_error();
    EXPECT_STREQ(dd_result_stage(r), "run");
    EXPECT_EQ(dd_result_observations(r), 300u);
    EXPECT_NE(std::string(dd_result_json(r)).find("\"beta_M\""), std::string::npos);
    EXPECT_NE(std::string(dd_result_summary(r)).find("R2"), std::string::npos);
    EXPECT_EQ(dd_result_file(r, 1000), nullptr);
    dd_result_free(r);
    dd_config_free(c);
}

TEST(CApi, ErrorKindsMapToStatus) {
    TempDir dir;
    dd_result_free(make_fixture(dir));
    dd_config* c = nullptr;
    ASSERT_EQ(dd_config_load((dir / "config.ini").c_str(), &c), DD_OK);
    dd_result* r = nullptr;
    ASSERT_EQ(dd_config_set(c, "sample.start", "2030-01-01"), DD_OK);
    ASSERT_EQ(dd_config_set(c, "sample.end", "2031-01-01"), DD_OK);
    EXPECT_EQ(dd_run(c, &r), DD_ERR_DATA);
    EXPECT_NE(std::string(dd_last_error()).find("0 rows"), std::string::npos) << dd_last_error();
    EXPECT_EQ(r, nullptr);
    ASSERT_EQ(dd_config_set(c, "sample.end", "2020-01-01"), DD_OK);
    EXPECT_EQ(dd_run(c, &r), DD_ERR_CONFIG);
    dd_config_free(c);
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(run_cli("fixture --n 300 --out " + dir.path().string()), 0);
    const auto cfg = (dir / "config.ini").string();
    EXPECT_EQ(run_cli("run --config " + cfg), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out/report.json"));
    EXPECT_EQ(run_cli("run --config " + cfg + " --start 2030-01-01 --end 2031-01-01 --out " + (dir / "o2").string()), 3);
    EXPECT_EQ(run_cli("run --config " + cfg + " --start 2031-01-01 --end 2030-01-01"), 2);
    EXPECT_EQ(run_cli("fixture --n 10 --out " + (dir / "fx2").string()), 2);
    std::ofstream(dir / "bad.ini") << "[nope]\nkey = 1\n";
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.ini").string()), 2);
    EXPECT_NE(run_cli("no-such-command"), 0);
}

TEST(Cli, StagesMatchRun) {
    TempDir dir;
    ASSERT_EQ(run_cli("fixture --n 300 --out " + dir.path().string()), 0);
    const auto cfg = (dir / "config.ini").string();
    ASSERT_EQ(run_cli("run --config " + cfg), 0);
    const auto staged = (dir / "staged").string();
    ASSERT_EQ(run_cli("build-factors --config " + cfg + " --out " + staged), 0);
    ASSERT_EQ(run_cli("split-cds --config " + cfg + " --out " + staged), 0);
    ASSERT_EQ(run_cli("decompose --config " + cfg + " --out " + staged), 0);
    EXPECT_EQ(slurp(dir / "staged/contributions.csv"), slurp(dir / "out/contributions.csv"));
    EXPECT_EQ(slurp(dir / "staged/decomposition.svg"), slurp(dir / "out/decomposition.svg"));
}
