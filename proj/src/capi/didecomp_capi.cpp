#include "didecomp/didecomp.h"

#include "didecomp/config.hpp"
#include "didecomp/errors.hpp"
#include "didecomp/fixture.hpp"
#include "didecomp/pipeline.hpp"
#include "didecomp/regression.hpp"

#include <exception>
#include <new>
#include <string>

struct dd_config {
    didecomp::ConfigStore store;
};

struct dd_result {
    std::string stage;
    std::string json;
    std::string summary;
    std::vector<std::string> files;
    std::size_t observations = 0;
};

struct dd_ols {
    didecomp::OlsFit fit;
};

namespace {

thread_local std::string g_last_error;

dd_status fail(dd_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

dd_status status_of(didecomp::ErrorKind kind) {
    switch (kind) {
        case didecomp::ErrorKind::Config: return DD_ERR_CONFIG;
        case didecomp::ErrorKind::Data: return DD_ERR_DATA;
        case didecomp::ErrorKind::Numerical: return DD_ERR_NUMERICAL;
    }
    return DD_ERR_INTERNAL;
}

template <typename F>
dd_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return DD_OK;
    } catch (const didecomp::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(DD_ERR_INTERNAL, "out of memory");
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(DD_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(DD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DD_ERR_INTERNAL, "unknown error");
    }
}

dd_result* to_result(const didecomp::StageResult& r) {
    auto* out = new dd_result;
    out->stage = r.stage;
    out->json = r.report.dump(2);
    out->summary = r.summary;
    out->observations = r.observations;
    for (const auto& f : r.files) out->files.push_back(f.string());
    return out;
}

template <typename Stage>
dd_status run_stage(const dd_config* config, dd_result** out, Stage&& stage) {
    if (!config || !out) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        const auto cfg = didecomp::resolve_config(config->store);
        *out = to_result(stage(cfg));
    });
}

}  // namespace

extern "C" {

const char* dd_version(void) { return didecomp::kSoftwareVersion; }

const char* dd_last_error(void) { return g_last_error.c_str(); }

const char* dd_status_name(dd_status status) {
    switch (status) {
        case DD_OK: return "ok";
        case DD_ERR_CONFIG: return "config error";
        case DD_ERR_DATA: return "data error";
        case DD_ERR_NUMERICAL: return "numerical error";
        case DD_ERR_INVALID_ARGUMENT: return "invalid argument";
        case DD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

dd_status dd_config_create(dd_config** out) {
    if (!out) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* c = new dd_config;
        c->store.apply_environment();
        *out = c;
    });
}

dd_status dd_config_load(const char* path, dd_config** out) {
    if (!path || !out) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new dd_config{didecomp::ConfigStore::from_file(path)}; });
}

dd_status dd_config_set(dd_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { config->store.set(key, value); });
}

dd_status dd_config_get(const dd_config* config, const char* key, const char** value) {
    if (!config || !key || !value) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *value = config->store.get(key).c_str(); });
}

void dd_config_free(dd_config* config) { delete config; }

dd_status dd_run(const dd_config* config, dd_result** out) {
    return run_stage(config, out, [](const auto& cfg) { return didecomp::run_pipeline(cfg, didecomp::make_http_get()); });
}

dd_status dd_fetch_focus(const dd_config* config, dd_result** out) {
    return run_stage(config, out,
                     [](const auto& cfg) { return didecomp::run_fetch_focus(cfg, didecomp::make_http_get()); });
}

dd_status dd_build_factors(const dd_config* config, dd_result** out) {
    return run_stage(config, out,
                     [](const auto& cfg) { return didecomp::run_build_factors(cfg, didecomp::make_http_get()); });
}

dd_status dd_split_cds(const dd_config* config, dd_result** out) {
    return run_stage(config, out, [](const auto& cfg) { return didecomp::run_split_cds(cfg); });
}

dd_status dd_decompose(const dd_config* config, dd_result** out) {
    return run_stage(config, out, [](const auto& cfg) { return didecomp::run_decompose(cfg); });
}

void dd_fixture_defaults(dd_fixture_params* params) {
    if (!params) return;
    const didecomp::FixtureParams d;
    params->seed = d.seed;
    params->n = d.n;
    for (int i = 0; i < 4; ++i) params->betas[i] = d.betas[static_cast<std::size_t>(i)];
    params->r2 = d.r2;
}

dd_status dd_generate_fixture(const dd_fixture_params* params, const char* out_dir, dd_result** out) {
    if (!params || !out_dir || !out) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        didecomp::FixtureParams p;
        p.seed = params->seed;
        p.n = params->n;
        for (std::size_t i = 0; i < 4; ++i) p.betas[i] = params->betas[i];
        p.r2 = params->r2;
        const auto r = didecomp::generate_fixture(p, out_dir);
        auto* res = new dd_result;
        res->stage = "fixture";
        res->json = r.truth.dump(2);
        res->summary = "fixture (seed " + std::to_string(p.seed) + ", n " + std::to_string(p.n) + ") written to " +
                       std::string(out_dir) + "\n";
        res->observations = p.n;
        for (const auto& f : r.files) res->files.push_back(f.string());
        *out = res;
    });
}

const char* dd_result_stage(const dd_result* result) { return result ? result->stage.c_str() : ""; }
const char* dd_result_json(const dd_result* result) { return result ? result->json.c_str() : ""; }
const char* dd_result_summary(const dd_result* result) { return result ? result->summary.c_str() : ""; }
size_t dd_result_observations(const dd_result* result) { return result ? result->observations : 0; }
size_t dd_result_file_count(const dd_result* result) { return result ? result->files.size() : 0; }

const char* dd_result_file(const dd_result* result, size_t index) {
    if (!result || index >= result->files.size()) return nullptr;
    return result->files[index].c_str();
}

void dd_result_free(dd_result* result) { delete result; }

dd_status dd_ols_fit(const double* y, const double* x, size_t n, size_t k, int intercept, dd_ols** out) {
    if (!y || !out || (k > 0 && !x)) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::vector<std::vector<double>> cols(k, std::vector<double>(n));
        std::vector<std::string> names(k);
        for (size_t j = 0; j < k; ++j) {
            names[j] = "x" + std::to_string(j + 1);
            for (size_t i = 0; i < n; ++i) cols[j][i] = x[i * k + j];
        }
        *out = new dd_ols{didecomp::ols_fit(std::span<const double>(y, n), cols, names, intercept != 0)};
    });
}

size_t dd_ols_coefficient_count(const dd_ols* fit) { return fit ? fit->fit.coefficients.size() : 0; }

dd_status dd_ols_coefficients(const dd_ols* fit, double* coef, double* se, double* t, double* p) {
    if (!fit) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    const auto& f = fit->fit;
    for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
        if (coef) coef[i] = f.coefficients[i];
        if (se) se[i] = f.standard_errors[i];
        if (t) t[i] = f.t_statistics[i];
        if (p) p[i] = f.p_values[i];
    }
    return DD_OK;
}

double dd_ols_r_squared(const dd_ols* fit) { return fit ? fit->fit.r_squared : 0.0; }
double dd_ols_adj_r_squared(const dd_ols* fit) { return fit ? fit->fit.adj_r_squared : 0.0; }
void dd_ols_free(dd_ols* fit) { delete fit; }

dd_status dd_student_t_p(double t, size_t dof, double* p) {
    if (!p) return fail(DD_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *p = didecomp::student_t_two_sided_p(t, dof); });
}

}  // extern "C"
