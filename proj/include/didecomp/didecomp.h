/* C interface to the DI5Y decomposition library.
 *
 * Every call returns a dd_status. On failure the message of the most recent
 * error on the calling thread is available from dd_last_error(). Objects are
 * opaque and owned by the caller, who releases them with the matching
 * dd_*_free function (NULL is accepted). Strings returned by accessors stay
 * valid until the owning object is freed. */
#ifndef DIDECOMP_DIDECOMP_H
#define DIDECOMP_DIDECOMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIDECOMP_BUILDING)
#    define DD_API __declspec(dllexport)
#  else
#    define DD_API __declspec(dllimport)
#  endif
#else
#  define DD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..4 are also the CLI exit codes. */
typedef enum dd_status {
    DD_OK = 0,
    DD_ERR_CONFIG = 2,
    DD_ERR_DATA = 3,
    DD_ERR_NUMERICAL = 4,
    DD_ERR_INVALID_ARGUMENT = 5,
    DD_ERR_INTERNAL = 6
} dd_status;

typedef struct dd_config dd_config;
typedef struct dd_result dd_result;
typedef struct dd_ols dd_ols;

DD_API const char* dd_version(void);
DD_API const char* dd_last_error(void);
DD_API const char* dd_status_name(dd_status status);

/* Configuration: defaults, optional file, DI_DECOMP_* environment, then
 * explicit dd_config_set calls ("section.key", value). */
DD_API dd_status dd_config_create(dd_config** out);
DD_API dd_status dd_config_load(const char* path, dd_config** out);
DD_API dd_status dd_config_set(dd_config* config, const char* key, const char* value);
DD_API dd_status dd_config_get(const dd_config* config, const char* key, const char** value);
DD_API void dd_config_free(dd_config* config);

/* Pipeline stages. Each writes its files into output.dir and returns a
 * result holding the JSON report and a human-readable summary. */
DD_API dd_status dd_run(const dd_config* config, dd_result** out);
DD_API dd_status dd_fetch_focus(const dd_config* config, dd_result** out);
DD_API dd_status dd_build_factors(const dd_config* config, dd_result** out);
DD_API dd_status dd_split_cds(const dd_config* config, dd_result** out);
DD_API dd_status dd_decompose(const dd_config* config, dd_result** out);

typedef struct dd_fixture_params {
    uint64_t seed;
    size_t n;
    double betas[4]; /* beta_0, beta_M, beta_D, beta_G */
    double r2;
} dd_fixture_params;

/* Fills the defaults (seed 1, n 2741, published-size betas, r2 0.2245). */
DD_API void dd_fixture_defaults(dd_fixture_params* params);
DD_API dd_status dd_generate_fixture(const dd_fixture_params* params, const char* out_dir, dd_result** out);

DD_API const char* dd_result_stage(const dd_result* result);
DD_API const char* dd_result_json(const dd_result* result);
DD_API const char* dd_result_summary(const dd_result* result);
DD_API size_t dd_result_observations(const dd_result* result);
DD_API size_t dd_result_file_count(const dd_result* result);
DD_API const char* dd_result_file(const dd_result* result, size_t index);
DD_API void dd_result_free(dd_result* result);

/* Least squares. x is row-major n x k; with intercept the constant is
 * coefficient 0 and the regressors follow. */
DD_API dd_status dd_ols_fit(const double* y, const double* x, size_t n, size_t k, int intercept, dd_ols** out);
DD_API size_t dd_ols_coefficient_count(const dd_ols* fit);
DD_API dd_status dd_ols_coefficients(const dd_ols* fit, double* coef, double* se, double* t, double* p);
DD_API double dd_ols_r_squared(const dd_ols* fit);
DD_API double dd_ols_adj_r_squared(const dd_ols* fit);
DD_API void dd_ols_free(dd_ols* fit);

/* Two-sided Student-t p-value. */
DD_API dd_status dd_student_t_p(double t, size_t dof, double* p);

#ifdef __cplusplus
}
#endif

#endif
