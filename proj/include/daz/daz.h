/* daz: annealed Moreau-envelope Langevin sampling toolkit.
 *
 * C interface of the shared library. All functions return daz_status;
 * DAZ_OK is 0 and daz_last_error() carries a thread-local message for the
 * most recent failure on the calling thread.
 */
#ifndef DAZ_DAZ_H
#define DAZ_DAZ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DAZ_API __declspec(dllexport)
#else
#define DAZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum daz_status {
  DAZ_OK = 0,
  DAZ_ERR_INVALID_ARGUMENT = 1,
  DAZ_ERR_DIMENSION = 2,
  DAZ_ERR_SOLVER = 3,
  DAZ_ERR_CONFIG = 4,
  DAZ_ERR_RUNTIME = 5,
  DAZ_ERR_IO = 6
} daz_status;

DAZ_API const char* daz_version(void);

/* Message for the last failing call on this thread; empty string if none. */
DAZ_API const char* daz_last_error(void);

/* ------------------------------------------------------------------ */
/* Potentials U = F + G with gradient access on F and prox access on G. */

typedef struct daz_potential daz_potential;

/* Built-in potentials and their parameter layout:
 *   "laplace"   ()                                   d = 1, F = 0, G = |x|
 *   "gaussian"  (dim)                                F = 0, G = ||x||^2/2
 *   "gmm4"      ()                                   d = 1, mixture potential
 *   "l1"        (dim, weight)                        F = 0, G = weight ||x||_1
 *   "tv_prior"  (dim, lambda)                        F = 0, G = lambda TV(x)
 *   "tv_chain"  (sigma, lambda, y[0..d-1])           F = ||x-y||^2/(2 sigma^2)
 *   "tv_image"  (rows, cols, sigma, lambda, y[...])  anisotropic 2D TV
 */
DAZ_API daz_status daz_potential_create(const char* name, const double* params, size_t n_params,
                                        daz_potential** out);
DAZ_API void daz_potential_destroy(daz_potential* potential);
DAZ_API daz_status daz_potential_dim(const daz_potential* potential, int32_t* out_dim);

/* F(x), G(x) and optionally grad F(x) (grad_f may be NULL). */
DAZ_API daz_status daz_potential_eval(const daz_potential* potential, const double* x, int32_t dim,
                                      double* f_value, double* g_value, double* grad_f);

/* prox_{tG}(x), M_G^t(x), and optionally grad M_G^t(x) = (x - prox)/t. */
DAZ_API daz_status daz_moreau_eval(const daz_potential* potential, double t, const double* x,
                                   int32_t dim, double* prox_point, double* envelope_value,
                                   double* envelope_grad);

/* d/dt M_G^t(x) = -|x - prox_{tG}(x)|^2 / (2 t^2). */
DAZ_API daz_status daz_moreau_time_derivative(const daz_potential* potential, double t,
                                              const double* x, int32_t dim, double* out);

/* ------------------------------------------------------------------ */
/* Stateless proximal kernels.                                         */

DAZ_API daz_status daz_prox_l1(const double* x, int32_t n, double weight, double t, double* out);

/* Exact 1D total-variation prox (direct dynamic-programming solver). */
DAZ_API daz_status daz_prox_tv1d(const double* signal, int32_t n, double weight, double t,
                                 double* out);

/* Anisotropic 2D total-variation prox by Dykstra splitting over rows and
 * columns of the exact 1D kernel. residual may be NULL. */
DAZ_API daz_status daz_prox_tv2d_aniso(const double* image, int32_t rows, int32_t cols,
                                       double weight, double t, double tolerance,
                                       int32_t max_sweeps, double* out, double* residual);

/* ------------------------------------------------------------------ */
/* Sampling.                                                           */

typedef struct daz_sampler_options {
  const char* kind;        /* ula | myula | skrock | ald | daz | daz-skrock */
  double t_small;          /* final (smallest) Moreau parameter            */
  double t_large;          /* initial (largest) Moreau parameter           */
  int32_t levels;          /* number of Moreau levels N                    */
  int32_t inner_steps;     /* Langevin steps per level K                   */
  const char* step_policy; /* "half-t" or "lipschitz"                      */
  double lip_grad_f;       /* used by "lipschitz"; <= 0 means unknown      */
  double skrock_eta;
  int32_t skrock_stages;
  double skrock_step_factor;
  int32_t mean_center;  /* nonzero: subtract the state mean each update    */
  double noise_scale;   /* 1.0 normally; 0.0 for deterministic debugging   */
} daz_sampler_options;

DAZ_API void daz_sampler_options_init(daz_sampler_options* options);

/* Runs n_chains parallel chains and writes the final states to out_states
 * (n_chains x dim, row-major). init_kind is "dirac" (init_params: dim
 * values) or "gaussian" (init_params: dim means followed by dim variances).
 * Results are a pure function of (options, potential, init, seed); thread
 * count only affects speed. out_failures (optional) receives the number of
 * chains stopped by the divergence guard. */
DAZ_API daz_status daz_sample_ensemble(const daz_potential* potential,
                                       const daz_sampler_options* options, const char* init_kind,
                                       const double* init_params, int32_t n_chains, uint64_t seed,
                                       int32_t n_threads, double* out_states,
                                       int32_t* out_failures);

/* ------------------------------------------------------------------ */
/* 1D references and metrics.                                          */

/* Normalized quadrature density of a registered scalar potential
 * ("abs", "quadratic", "zero", "gmm4") on a uniform grid. */
DAZ_API daz_status daz_density_1d(const char* scalar_name, double lo, double hi, int32_t n,
                                  double* out_values, double* out_log_partition);

/* Unnormalized TV distance (integral of |p - q|, range [0, 2]) between the
 * auto-binned histograms of two sample sets. */
DAZ_API daz_status daz_tv_distance_samples(const double* a, int32_t na, const double* b, int32_t nb,
                                           double* out);

/* ------------------------------------------------------------------ */
/* Experiment driver.                                                  */

/* Runs the experiment described by the config file. overrides is NULL or
 * "key=value" lines applied on top of the file. */
DAZ_API daz_status daz_experiment_run(const char* config_path, const char* overrides);

/* Static checks only. diagnostics (optional) receives newline-separated
 * "error: ..." / "warning: ..." lines; n_errors the number of errors. */
DAZ_API daz_status daz_experiment_validate(const char* config_path, const char* overrides,
                                           char* diagnostics, size_t diagnostics_len,
                                           int32_t* n_errors);

/* Comma-separated experiment names. */
DAZ_API daz_status daz_experiment_list(char* names, size_t names_len);

#ifdef __cplusplus
}
#endif

#endif /* DAZ_DAZ_H */
