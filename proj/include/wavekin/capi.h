/* C interface to the wavekin core: opaque handles plus status codes.
 * Every function returns WK_OK on success; on failure wk_last_error() holds
 * a thread-local description of what went wrong. */
#ifndef WAVEKIN_CAPI_H
#define WAVEKIN_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wk_status {
  WK_OK = 0,
  WK_EINVAL = 1,  /* configuration or argument validation failed */
  WK_ERUNTIME = 2 /* runtime failure (I/O, integration abort, ...) */
} wk_status;

typedef struct wk_config wk_config;
typedef struct wk_grid wk_grid;

const char* wk_last_error(void);
const char* wk_version(void);

/* --- configuration ----------------------------------------------------- */
wk_status wk_config_parse(const char* json_text, wk_config** out);
wk_status wk_config_load(const char* path, wk_config** out);
void wk_config_free(wk_config* cfg);

/* theorem1 != 0 additionally enforces the Theorem-4.1 constraints
 * (1 <= alpha <= 2, delta > 0, h <= delta^2 unless overridden). */
wk_status wk_config_validate(const wk_config* cfg, int theorem1);

/* Resolved experiment plan as text; free with wk_string_free. */
wk_status wk_config_plan(const wk_config* cfg, char** out_text);
void wk_string_free(char* text);

/* --- frequency grid ----------------------------------------------------- */
wk_status wk_grid_create(const wk_config* cfg, wk_grid** out);
void wk_grid_free(wk_grid* grid);
int wk_grid_mode_count(const wk_grid* grid);
/* One row per mode: i, j, k_x, k_y, omega, gamma, psi. */
wk_status wk_grid_dump_csv(const wk_grid* grid, const char* path);

/* --- pipelines ----------------------------------------------------------
 * Outputs are written into the config's outdir. Every pipeline output is a
 * pure function of (config, seed) except the wall-time entry of
 * manifest.json. */
wk_status wk_run_simulate(const wk_config* cfg);
wk_status wk_run_compare(const wk_config* cfg);
wk_status wk_run_flatness(const wk_config* cfg);

/* Kinetic solve only; lambda_override > 0 replaces lambda = 3 delta and a
 * non-NULL form_override ("lorentzian"|"resonant") replaces the configured
 * form. Writes tau, m_x, m_y, f rows to out_csv. */
wk_status wk_run_kinetic(const wk_config* cfg, const char* form_override,
                         double lambda_override, const char* out_csv);

/* Sampler verification: per-mode CSV (k_x, k_y, gamma, target_variance,
 * sample_mean_action, stderr) plus a JSON footer with the analytic
 * chi-square value. ensemble <= 0 uses the config value. */
wk_status wk_run_sample_check(const wk_config* cfg, long long ensemble,
                              const char* out_csv);

/* --- resonance census ---------------------------------------------------
 * cfg may be NULL, in which case the default domain is used. */
wk_status wk_census_denominators(const char* eta, const char* n_list,
                                 const char* order, const wk_config* cfg,
                                 const char* out_csv);
wk_status wk_census_modulus(const char* eta, int m_ix, int m_iy, int N,
                            const wk_config* cfg, const char* out_csv);
wk_status wk_census_curve(double m_x, double m_y, double z, int n_sigma,
                          const wk_config* cfg, const char* out_csv);

/* Re-render the SVG plots of a finished run directory. */
wk_status wk_replot(const char* outdir);

#ifdef __cplusplus
}
#endif

#endif /* WAVEKIN_CAPI_H */
