#ifndef ROY_EXACT_H
#define ROY_EXACT_H

/* Largest-root distributions of the doubly singular beta ensemble.
 *
 * Every fallible call returns a roy_status and, when given a context,
 * records a message retrievable with roy_context_last_error. A context is
 * not thread-safe; use one per thread. Handles are opaque and owned by the
 * caller, who releases them with the matching *_destroy function (NULL is
 * accepted). Matrices passed in are column-major. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ROY_API
#else
#define ROY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum roy_status {
  ROY_OK = 0,
  ROY_ERR_INVALID_ARGUMENT = 1,
  ROY_ERR_INVALID_PARAMS = 2,
  ROY_ERR_UNSUPPORTED_PARAMS = 3,
  ROY_ERR_RESAMPLE_CAP = 4,
  ROY_ERR_RANK_DEFICIENT = 5,
  ROY_ERR_NOT_POSITIVE_DEFINITE = 6,
  ROY_ERR_DOMAIN = 7,
  ROY_ERR_DEGENERATE_DOF = 8,
  ROY_ERR_IO = 9,
  ROY_ERR_INTERNAL = 10
} roy_status;

typedef enum roy_method {
  ROY_METHOD_EXACT = 0,
  ROY_METHOD_THEOREM1 = 1,
  ROY_METHOD_THEOREM2 = 2,
  ROY_METHOD_TW = 3
} roy_method;

/* Bits reported through `unsigned* warnings` out-parameters. */
enum {
  ROY_WARN_CONDITIONING = 1u, /* exact engine lost accuracy at some point */
  ROY_WARN_REGIME = 2u,       /* Tracy-Widom used with q > m / 10 */
  ROY_WARN_B_ABOVE_ONE = 4u   /* estimated correction factor exceeds 1 */
};

/* Ensemble: A ~ W_p(m, S), B ~ W_p(q, S), p > max(m, q). */
typedef struct roy_params {
  int64_t p;
  int64_t m;
  int64_t q;
} roy_params;

/* Double Wishart: largest eigenvalue of W_s(num) W_s(den)^{-1}. */
typedef struct roy_dw_params {
  int64_t dimension;
  int64_t num_dof;
  int64_t den_dof;
} roy_dw_params;

typedef struct roy_scale_stats {
  double a1_hat;
  double a2_hat;
  double b;
} roy_scale_stats;

/* One replicate of a scale-estimation campaign. */
typedef struct roy_replicate {
  double lambda; /* largest root */
  double b_hat;  /* estimated from the drawn A */
  double b_true; /* from the scale actually used */
} roy_replicate;

typedef struct roy_context roy_context;
typedef struct roy_scale roy_scale;
typedef struct roy_cdf roy_cdf;
typedef struct roy_empirical roy_empirical;

ROY_API const char* roy_version(void);
ROY_API const char* roy_status_string(roy_status status);

/* Context ------------------------------------------------------------- */

ROY_API roy_status roy_context_create(roy_context** out);
ROY_API void roy_context_destroy(roy_context* ctx);
/* Message of the last failure on this context ("" if none). */
ROY_API const char* roy_context_last_error(const roy_context* ctx);
/* 0 selects ROY_EXACT_WORKERS or the hardware thread count. */
ROY_API roy_status roy_context_set_workers(roy_context* ctx, unsigned workers);
ROY_API unsigned roy_context_workers(const roy_context* ctx);

/* Scale matrices ------------------------------------------------------- */

ROY_API roy_status roy_scale_identity(roy_context* ctx, int64_t p, roy_scale** out);
ROY_API roy_status roy_scale_diagonal(roy_context* ctx, const double* values, int64_t p, roy_scale** out);
ROY_API roy_status roy_scale_dense(roy_context* ctx, const double* entries, int64_t p, roy_scale** out);
/* p x p CSV without header; an exactly diagonal matrix becomes a diagonal scale. */
ROY_API roy_status roy_scale_load_csv(roy_context* ctx, const char* path, roy_scale** out);
/* law: "identity", "uniform[:LO:HI]", "lognormal[:SIGMA]" or "dense". */
ROY_API roy_status roy_scale_random(roy_context* ctx, int64_t p, const char* law, uint64_t seed, uint64_t stream,
                                    roy_scale** out);
ROY_API void roy_scale_destroy(roy_scale* scale);
ROY_API int64_t roy_scale_order(const roy_scale* scale);
ROY_API roy_status roy_scale_moments(roy_context* ctx, const roy_scale* scale, roy_scale_stats* out);

/* Exact laws ------------------------------------------------------------ */

ROY_API roy_status roy_mardia_dual(roy_context* ctx, roy_dw_params params, roy_dw_params* out);
ROY_API roy_status roy_double_wishart_cdf(roy_context* ctx, roy_dw_params params, const double* x, size_t n,
                                          double* out, unsigned* warnings);
ROY_API roy_status roy_wishart_max_cdf(roy_context* ctx, int64_t dim, int64_t dof, const double* x, size_t n,
                                       double* out, unsigned* warnings);
ROY_API roy_status roy_tracy_widom1_cdf(roy_context* ctx, const double* s, size_t n, double* out);
ROY_API roy_status roy_tw_centering(roy_context* ctx, roy_params params, double* mu, double* sigma);

/* Ensemble CDF evaluators ---------------------------------------------- */

/* `b` is used only by ROY_METHOD_THEOREM2. */
ROY_API roy_status roy_cdf_create(roy_context* ctx, roy_params params, roy_method method, double b, roy_cdf** out);
ROY_API void roy_cdf_destroy(roy_cdf* cdf);
/* Reports ROY_WARN_REGIME for tw outside its intended regime. */
ROY_API unsigned roy_cdf_warnings(const roy_cdf* cdf);
/* Pointwise values at arbitrary x >= 0. */
ROY_API roy_status roy_cdf_evaluate(roy_context* ctx, const roy_cdf* cdf, const double* x, size_t n, double* out,
                                    unsigned* warnings);
/* Ascending grid; output made monotone by a running maximum. */
ROY_API roy_status roy_cdf_curve(roy_context* ctx, const roy_cdf* cdf, const double* grid, size_t n, double* out,
                                 unsigned* warnings);
ROY_API roy_status roy_cdf_p_value(roy_context* ctx, const roy_cdf* cdf, double observed, double* out);
ROY_API roy_status roy_cdf_quantile(roy_context* ctx, const roy_cdf* cdf, double prob, double* out);

/* Scale estimation ------------------------------------------------------ */

/* data: rows x cols column-major. With realized == 0 it is a p x m factor Z
 * of A = Z Z^T (dof = cols); otherwise the p x p matrix A itself with `dof`
 * degrees of freedom. */
ROY_API roy_status roy_estimate_scale_moments(roy_context* ctx, const double* data, int64_t rows, int64_t cols,
                                              int realized, int64_t dof, roy_scale_stats* out, unsigned* warnings);
ROY_API roy_status roy_estimate_scale_moments_csv(roy_context* ctx, const char* path, int realized, int64_t dof,
                                                  roy_scale_stats* out, unsigned* warnings);

/* Simulation ------------------------------------------------------------ */

/* n_sims largest roots with replicate i on stream i of `seed`; the result
 * does not depend on the worker count. */
ROY_API roy_status roy_simulate(roy_context* ctx, roy_params params, const roy_scale* scale, uint64_t seed,
                                size_t n_sims, roy_empirical** out);
/* Replicates that also estimate b from the drawn A. With random_law != NULL
 * every replicate first draws its own scale from that law; otherwise `scale`
 * is used throughout. */
ROY_API roy_status roy_simulate_with_estimate(roy_context* ctx, roy_params params, const roy_scale* scale,
                                              const char* random_law, uint64_t seed, size_t n,
                                              roy_replicate* out);
/* Largest root of a single draw by both the reduced and the direct
 * (pseudoinverse) path. */
ROY_API roy_status roy_largest_root_paths(roy_context* ctx, roy_params params, const roy_scale* scale, uint64_t seed,
                                          uint64_t stream, double* reduced, double* direct);
ROY_API void roy_empirical_destroy(roy_empirical* empirical);
ROY_API size_t roy_empirical_size(const roy_empirical* empirical);
/* Ascending samples, valid until the handle is destroyed. */
ROY_API const double* roy_empirical_samples(const roy_empirical* empirical);
ROY_API size_t roy_empirical_resampled(const roy_empirical* empirical);
ROY_API double roy_empirical_eval(const roy_empirical* empirical, double x);
ROY_API roy_status roy_empirical_write_csv(roy_context* ctx, const roy_empirical* empirical, const char* path);

/* Goodness of fit ------------------------------------------------------- */

ROY_API roy_status roy_ks_distance(roy_context* ctx, const roy_empirical* empirical, const roy_cdf* cdf,
                                   double* out);
ROY_API roy_status roy_ks_distance_samples(roy_context* ctx, const double* samples, size_t n, const roy_cdf* cdf,
                                           double* out);
ROY_API double roy_ks_p_value(double distance, size_t n);

#ifdef __cplusplus
}
#endif

#endif /* ROY_EXACT_H */
