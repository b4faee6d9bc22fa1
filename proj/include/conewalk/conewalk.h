/* C interface to the cone-walker library.
 *
 * All objects are opaque handles; every function returns a cw_status.
 * Strings returned through `char**` are heap-allocated and must be released
 * with cw_string_free(). On error, cw_last_error() returns a thread-local
 * description of the most recent failure.
 */
#ifndef CONEWALK_CONEWALK_H
#define CONEWALK_CONEWALK_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cw_status {
    CW_OK = 0,
    CW_ERR_CONFIG = 1,
    CW_ERR_NON_ZERO_DRIFT = 2,
    CW_ERR_DEGENERATE_SUPPORT = 3,
    CW_ERR_SINGULAR_COVARIANCE = 4,
    CW_ERR_DIMENSION_MISMATCH = 5,
    CW_ERR_POINT_OUTSIDE_CONE = 6,
    CW_ERR_START_OUTSIDE_CONE = 7,
    CW_ERR_UNSUPPORTED_TRANSFORM = 8,
    CW_ERR_NO_CLOSED_FORM = 9,
    CW_ERR_SERIES_NOT_CONVERGED = 10,
    CW_ERR_FIT_DIVERGED = 11,
    CW_ERR_NON_POSITIVE_VALUE = 12,
    CW_ERR_EMPTY_GRID = 13,
    CW_ERR_IO = 14,
    CW_ERR_INTERNAL = 15,
} cw_status;

typedef struct cw_model cw_model;
typedef struct cw_cone cw_cone;

const char* cw_version(void);

/* Thread-local message for the last failed call in this thread. */
const char* cw_last_error(void);

void cw_string_free(char* s);

/* ---- step-law models ---- */
cw_status cw_model_parse(const char* json_text, cw_model** out);
cw_status cw_model_load(const char* path, cw_model** out);
void cw_model_free(cw_model* m);

/* Validation report (mean, covariance, period, lattice metadata) as JSON.
 * Pass a cone to include the reverse-reachability hint, or NULL. */
cw_status cw_model_report_json(const cw_model* m, const cw_cone* cone_or_null,
                               char** json_out);
cw_status cw_model_decorrelate_json(const cw_model* m, char** json_out);

/* ---- cones ---- */
cw_status cw_cone_parse(const char* json_text, cw_cone** out);
cw_status cw_cone_load(const char* path, cw_cone** out);
void cw_cone_free(cw_cone* c);
cw_status cw_cone_info_json(const cw_cone* c, char** json_out);

/* ---- reduite ---- */
cw_status cw_reduite_eval(const cw_cone* c, const double* x, int dim, double* out);
cw_status cw_reduite_check_json(const cw_cone* c, int samples, double h, char** json_out);

/* ---- command runners ----
 * Each takes the parameters of one CLI subcommand as a JSON object and
 * returns a JSON report (schema-versioned, with the resolved parameters
 * embedded). The "op" key selects the operation:
 *   exact:  survival | local | green | harmonic-v | count
 *   mc:     survival | boundary-functional | stopping-tail | fuk-nagaev | max-moment
 *   bm:     kernel | survival | fit-constants | check-bounds
 *   verify: survival | llt-exponent | interior | boundary | harmonic-v | lower-bound
 */
cw_status cw_exact_run(const cw_model* m, const cw_cone* c, const char* params_json,
                       char** report_json);
cw_status cw_mc_run(const cw_model* m, const cw_cone* c, const char* params_json,
                    char** report_json);
cw_status cw_bm_run(const cw_cone* c, const char* params_json, char** report_json);
cw_status cw_verify_run(const cw_model* m, const cw_cone* c, const char* params_json,
                        char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* CONEWALK_CONEWALK_H */
