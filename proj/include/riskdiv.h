/* riskdiv — discrete-time optimal dividend payout under entropic
 * (risk-sensitive) recursive preferences.
 *
 * C interface of the shared library. All handles are opaque; every handle
 * returned by a rd_*_create / rd_solve_* call must be released with the
 * matching rd_*_destroy. Handles are immutable after creation and safe to
 * read from multiple threads. Functions returning rd_status leave outputs
 * untouched on failure; rd_last_error() describes the most recent failure
 * on the calling thread.
 */
#ifndef RISKDIV_H
#define RISKDIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RISKDIV_API __declspec(dllexport)
#else
#define RISKDIV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rd_status {
    RD_OK = 0,
    RD_ERR_INVALID_ARGUMENT = 1,
    RD_ERR_MODEL_INVALID = 2,
    RD_ERR_EMPTY_SUPPORT = 3,
    RD_ERR_GRID_TOO_SHORT = 4,
    RD_ERR_MAX_ITER = 5,
    RD_ERR_NOT_BAND_STRUCTURED = 6,
    RD_ERR_PRECONDITION = 7,
    RD_ERR_REGIME = 8,
    RD_ERR_INTERNAL = 9
} rd_status;

RISKDIV_API const char* rd_status_name(rd_status s);
/* Thread-local message for the most recent failing call. */
RISKDIV_API const char* rd_last_error(void);
RISKDIV_API void rd_version(int* major, int* minor, int* patch);

/* ------------------------------------------------------------------ */
/* Increment models                                                    */

typedef struct rd_model rd_model;

RISKDIV_API rd_status rd_model_create_left_exponential(double lambda, double d, rd_model** out);
RISKDIV_API rd_status rd_model_create_double_exponential(double mu, rd_model** out);
RISKDIV_API rd_status rd_model_create_tabulated(const double* nodes, const double* densities,
                                                size_t n, rd_model** out);
RISKDIV_API void rd_model_destroy(rd_model* model);

RISKDIV_API double rd_model_pdf(const rd_model* model, double z);
RISKDIV_API double rd_model_cdf(const rd_model* model, double z);
RISKDIV_API double rd_model_mean_positive_part(const rd_model* model);
/* rho(Z^+); gamma = 0 yields E[Z^+]. */
RISKDIV_API rd_status rd_model_entropic_premium(const rd_model* model, double gamma, double* out);

#define RD_VIOLATION_SHIFT_RATE 1     /* left exponential with lambda*d <= 1 */
#define RD_VIOLATION_RUIN_IMPOSSIBLE 2 /* nu(-inf,0) = 0                      */
/* Writes up to cap violation codes; returns the total count (0 = valid). */
RISKDIV_API int rd_model_validate(const rd_model* model, int* codes, int cap);
RISKDIV_API const char* rd_violation_describe(int code);
RISKDIV_API int rd_model_has_boundary_density_jump(const rd_model* model);

/* bbar = beta E[Z^+]/(1-beta); xi_star = bbar/(1-beta). */
RISKDIV_API rd_status rd_bbar(const rd_model* model, double beta, double* out);
RISKDIV_API rd_status rd_xi_star(const rd_model* model, double beta, double* out);
/* Default grid: step = bbar/2000, x_max = xi_star + 10 steps. */
RISKDIV_API rd_status rd_auto_grid(const rd_model* model, double beta, double* step,
                                   size_t* n_nodes);

/* ------------------------------------------------------------------ */
/* Solvers. Grids are uniform with nodes x_i = i*step, i < n_nodes.    */

typedef struct rd_solution rd_solution;

typedef struct rd_solve_report {
    uint64_t iterations;
    double final_residual;
    double certified_error;
    double xi_estimate;
    double tail_extension_error;
    double wall_time_seconds;
} rd_solve_report;

RISKDIV_API rd_status rd_solve_infinite(const rd_model* model, double beta, double gamma,
                                        double step, size_t n_nodes, double tol,
                                        rd_solution** out);
RISKDIV_API rd_status rd_solve_policy_iteration(const rd_model* model, double beta, double gamma,
                                                double step, size_t n_nodes, double tol,
                                                rd_solution** out);
RISKDIV_API void rd_solution_destroy(rd_solution* s);

RISKDIV_API size_t rd_solution_size(const rd_solution* s);
RISKDIV_API double rd_solution_step(const rd_solution* s);
/* Buffers must hold rd_solution_size(s) doubles. */
RISKDIV_API void rd_solution_values(const rd_solution* s, double* buf);
RISKDIV_API void rd_solution_actions(const rd_solution* s, double* buf);
RISKDIV_API void rd_solution_report(const rd_solution* s, rd_solve_report* out);
/* Per-improvement sup-norm value gaps (empty unless policy iteration). */
RISKDIV_API size_t rd_solution_gap_count(const rd_solution* s);
RISKDIV_API void rd_solution_gaps(const rd_solution* s, double* buf);

typedef struct rd_finite rd_finite;

RISKDIV_API rd_status rd_solve_finite(const rd_model* model, double beta, double gamma,
                                      double step, size_t n_nodes, unsigned horizon,
                                      rd_finite** out);
RISKDIV_API void rd_finite_destroy(rd_finite* f);
RISKDIV_API size_t rd_finite_size(const rd_finite* f);
RISKDIV_API unsigned rd_finite_horizon(const rd_finite* f);
/* Values of J_n (n = 1..horizon payments remaining). */
RISKDIV_API rd_status rd_finite_values(const rd_finite* f, unsigned n, double* buf);
/* J_n at an arbitrary surplus (linear interpolation between nodes). */
RISKDIV_API rd_status rd_finite_value_at(const rd_finite* f, unsigned n, double x, double* out);
/* Time-indexed decision rule used at epoch t = 1..horizon. */
RISKDIV_API rd_status rd_finite_actions(const rd_finite* f, unsigned t, double* buf);

/* ------------------------------------------------------------------ */
/* Band structure of a grid policy                                     */

typedef struct rd_bands rd_bands;

#define RD_POLICY_PAY_ALL 0
#define RD_POLICY_BARRIER 1
#define RD_POLICY_FINITE_BAND 2

/* eps_zero <= 0 selects the default step/2. */
RISKDIV_API rd_status rd_bands_extract(const double* actions, size_t n, double step,
                                       double eps_zero, rd_bands** out);
RISKDIV_API void rd_bands_destroy(rd_bands* b);
/* Number of retention levels c_0..c_m (count = m + 1). */
RISKDIV_API size_t rd_bands_count(const rd_bands* b);
/* c must hold count entries, d count-1 (upper trigger of each inner band). */
RISKDIV_API void rd_bands_levels(const rd_bands* b, double* c, double* d);
RISKDIV_API int rd_bands_classify(const rd_bands* b);
RISKDIV_API double rd_bands_xi(const rd_bands* b);
/* alpha(x) reconstructed from the band records. */
RISKDIV_API double rd_bands_action(const rd_bands* b, double x);

RISKDIV_API double rd_policy_xi(const double* actions, size_t n, double step, double eps_zero);

/* ------------------------------------------------------------------ */
/* Case studies                                                        */

#define RD_REGIME_PAY_ALL 0
#define RD_REGIME_INTERIOR_BARRIER 1

RISKDIV_API rd_status rd_exp_case_regime(double lambda, double d, double beta, double gamma,
                                         int* out);
RISKDIV_API rd_status rd_exp_barrier_value(double lambda, double d, double beta, double gamma,
                                           double* out);
RISKDIV_API rd_status rd_two_stage_value(const rd_model* model, double beta, double gamma,
                                         double x, double* out);
RISKDIV_API rd_status rd_three_stage_barrier(const rd_model* model, double beta, double gamma,
                                             double* out);

/* ------------------------------------------------------------------ */
/* Validation oracles                                                  */

/* Nested Monte-Carlo evaluation of the time-indexed stage policies held by a
 * finite-horizon solution, started at surplus x. Deterministic in (seed);
 * RD_THREADS caps worker parallelism without changing the result. */
RISKDIV_API rd_status rd_nested_mc(const rd_finite* f, const rd_model* model, double beta,
                                   double gamma, double x, uint64_t outer_samples,
                                   uint64_t inner_samples, uint64_t seed, double* estimate,
                                   double* stderr_proxy);

/* Independently coded risk-neutral value iteration; buf holds n_nodes values. */
RISKDIV_API rd_status rd_risk_neutral_values(const rd_model* model, double beta, double step,
                                             size_t n_nodes, double tol, double* buf);
RISKDIV_API rd_status rd_risk_neutral_xi(const rd_model* model, double beta, double step,
                                         size_t n_nodes, double tol, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RISKDIV_H */
