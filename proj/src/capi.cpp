#include "daz/daz.h"

#include <cstring>
#include <string>

#include "common.hpp"
#include "config.hpp"
#include "density.hpp"
#include "experiment.hpp"
#include "metrics.hpp"
#include "potential.hpp"
#include "prox.hpp"
#include "sampler.hpp"
#include "scalar.hpp"

namespace {

thread_local std::string g_last_error;

daz_status code_to_status(daz::Error::Code c) {
  switch (c) {
    case daz::Error::Code::InvalidArgument: return DAZ_ERR_INVALID_ARGUMENT;
    case daz::Error::Code::Dimension: return DAZ_ERR_DIMENSION;
    case daz::Error::Code::Solver: return DAZ_ERR_SOLVER;
    case daz::Error::Code::Config: return DAZ_ERR_CONFIG;
    case daz::Error::Code::Runtime: return DAZ_ERR_RUNTIME;
    case daz::Error::Code::Io: return DAZ_ERR_IO;
  }
  return DAZ_ERR_RUNTIME;
}

template <typename Fn>
daz_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DAZ_OK;
  } catch (const daz::Error& e) {
    g_last_error = e.what();
    return code_to_status(e.code);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DAZ_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return DAZ_ERR_RUNTIME;
  }
}

void copy_string(const std::string& s, char* buf, size_t len) {
  if (buf == nullptr || len == 0) return;
  const size_t n = std::min(len - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

std::map<std::string, std::string> parse_overrides(const char* overrides) {
  if (overrides == nullptr || overrides[0] == '\0') return {};
  return daz::parse_key_values(overrides);
}

}  // namespace

struct daz_potential {
  daz::SplitPotential impl;
};

extern "C" {

const char* daz_version(void) { return daz::kVersion; }

const char* daz_last_error(void) { return g_last_error.c_str(); }

daz_status daz_potential_create(const char* name, const double* params, size_t n_params,
                                daz_potential** out) {
  return guarded([&] {
    daz::require(name != nullptr && out != nullptr, daz::Error::Code::InvalidArgument,
                 "daz_potential_create: null argument");
    const std::string n = name;
    daz::SplitPotential p;
    const auto need = [&](size_t count) {
      daz::require(n_params >= count && params != nullptr, daz::Error::Code::InvalidArgument,
                   "daz_potential_create: '" + n + "' needs " + std::to_string(count) +
                       " parameters");
    };
    if (n == "laplace") {
      p = daz::make_laplace_potential();
    } else if (n == "gaussian") {
      need(1);
      p = daz::make_gaussian_potential(static_cast<int>(params[0]));
    } else if (n == "gmm4") {
      p = daz::make_gmm4_potential();
    } else if (n == "l1") {
      need(2);
      p = daz::make_l1_potential(static_cast<int>(params[0]), params[1]);
    } else if (n == "tv_prior") {
      need(2);
      p = daz::make_tv_prior_potential(static_cast<int>(params[0]), params[1]);
    } else if (n == "tv_chain") {
      need(3);
      const daz::Vec y(params + 2, params + n_params);
      p = daz::make_tv_chain_potential(y, params[0], params[1]);
    } else if (n == "tv_image") {
      need(5);
      const int rows = static_cast<int>(params[0]);
      const int cols = static_cast<int>(params[1]);
      need(4 + static_cast<size_t>(rows) * cols);
      daz::Matrix img(rows, cols);
      std::copy(params + 4, params + 4 + static_cast<size_t>(rows) * cols, img.data.begin());
      p = daz::make_tv_image_potential(img, params[2], params[3]);
    } else {
      daz::fail(daz::Error::Code::InvalidArgument, "daz_potential_create: unknown potential '" +
                                                       n + "'");
    }
    *out = new daz_potential{std::move(p)};
  });
}

void daz_potential_destroy(daz_potential* potential) { delete potential; }

daz_status daz_potential_dim(const daz_potential* potential, int32_t* out_dim) {
  return guarded([&] {
    daz::require(potential != nullptr && out_dim != nullptr, daz::Error::Code::InvalidArgument,
                 "daz_potential_dim: null argument");
    *out_dim = potential->impl.dim;
  });
}

daz_status daz_potential_eval(const daz_potential* potential, const double* x, int32_t dim,
                              double* f_value, double* g_value, double* grad_f) {
  return guarded([&] {
    daz::require(potential && x && f_value && g_value, daz::Error::Code::InvalidArgument,
                 "daz_potential_eval: null argument");
    const daz::Vec xv(x, x + dim);
    const daz::SplitEval ev = daz::eval_split(potential->impl, xv);
    *f_value = ev.f_val;
    *g_value = ev.g_val;
    if (grad_f) std::copy(ev.grad_f.begin(), ev.grad_f.end(), grad_f);
  });
}

daz_status daz_moreau_eval(const daz_potential* potential, double t, const double* x, int32_t dim,
                           double* prox_point, double* envelope_value, double* envelope_grad) {
  return guarded([&] {
    daz::require(potential && x, daz::Error::Code::InvalidArgument,
                 "daz_moreau_eval: null argument");
    const daz::Vec xv(x, x + dim);
    const daz::MoreauPoint mp = daz::moreau_eval(potential->impl, t, xv);
    if (prox_point) std::copy(mp.prox_point.begin(), mp.prox_point.end(), prox_point);
    if (envelope_value) *envelope_value = mp.envelope_value;
    if (envelope_grad) std::copy(mp.envelope_grad.begin(), mp.envelope_grad.end(), envelope_grad);
  });
}

daz_status daz_moreau_time_derivative(const daz_potential* potential, double t, const double* x,
                                      int32_t dim, double* out) {
  return guarded([&] {
    daz::require(potential && x && out, daz::Error::Code::InvalidArgument,
                 "daz_moreau_time_derivative: null argument");
    const daz::Vec xv(x, x + dim);
    *out = daz::moreau_time_derivative(potential->impl, t, xv);
  });
}

daz_status daz_prox_l1(const double* x, int32_t n, double weight, double t, double* out) {
  return guarded([&] {
    daz::require(x && out && n >= 1, daz::Error::Code::InvalidArgument, "daz_prox_l1: bad input");
    const daz::Vec r = daz::prox_l1(daz::Vec(x, x + n), weight, t);
    std::copy(r.begin(), r.end(), out);
  });
}

daz_status daz_prox_tv1d(const double* signal, int32_t n, double weight, double t, double* out) {
  return guarded([&] {
    daz::require(signal && out && n >= 1, daz::Error::Code::InvalidArgument,
                 "daz_prox_tv1d: bad input");
    const daz::Vec r = daz::prox_tv1d(daz::Vec(signal, signal + n), weight, t);
    std::copy(r.begin(), r.end(), out);
  });
}

daz_status daz_prox_tv2d_aniso(const double* image, int32_t rows, int32_t cols, double weight,
                               double t, double tolerance, int32_t max_sweeps, double* out,
                               double* residual) {
  return guarded([&] {
    daz::require(image && out && rows >= 1 && cols >= 1, daz::Error::Code::InvalidArgument,
                 "daz_prox_tv2d_aniso: bad input");
    daz::Matrix img(rows, cols);
    std::copy(image, image + static_cast<size_t>(rows) * cols, img.data.begin());
    const daz::Tv2dResult r = daz::prox_tv2d_aniso(img, weight, t, tolerance, max_sweeps);
    std::copy(r.image.data.begin(), r.image.data.end(), out);
    if (residual) *residual = r.residual;
    if (!r.converged)
      daz::fail(daz::Error::Code::Solver,
                "daz_prox_tv2d_aniso: tolerance not reached (residual " +
                    std::to_string(r.residual) + ")");
  });
}

void daz_sampler_options_init(daz_sampler_options* options) {
  if (!options) return;
  options->kind = "daz";
  options->t_small = 1e-4;
  options->t_large = 1e-2;
  options->levels = 50;
  options->inner_steps = 20;
  options->step_policy = "half-t";
  options->lip_grad_f = -1.0;
  options->skrock_eta = 0.05;
  options->skrock_stages = 5;
  options->skrock_step_factor = 0.9;
  options->mean_center = 0;
  options->noise_scale = 1.0;
}

daz_status daz_sample_ensemble(const daz_potential* potential, const daz_sampler_options* options,
                               const char* init_kind, const double* init_params, int32_t n_chains,
                               uint64_t seed, int32_t n_threads, double* out_states,
                               int32_t* out_failures) {
  return guarded([&] {
    daz::require(potential && options && init_kind && init_params && out_states,
                 daz::Error::Code::InvalidArgument, "daz_sample_ensemble: null argument");
    const int d = potential->impl.dim;
    std::optional<double> lip;
    if (options->lip_grad_f > 0.0) lip = options->lip_grad_f;
    else lip = potential->impl.lip_grad_f;
    const daz::StepPolicy policy = std::string(options->step_policy) == "lipschitz"
                                       ? daz::StepPolicy::Lipschitz
                                       : daz::StepPolicy::HalfT;
    daz::SamplerSpec spec;
    spec.kind = daz::sampler_kind_from_name(options->kind);
    spec.schedule = daz::make_loglinear_schedule(options->t_small, options->t_large,
                                                 options->levels, options->inner_steps, policy, lip);
    spec.skrock_eta = options->skrock_eta;
    spec.skrock_stages = options->skrock_stages;
    spec.skrock_step_factor = options->skrock_step_factor;
    spec.mean_center = options->mean_center != 0;
    spec.noise_scale = options->noise_scale;

    daz::InitSpec init;
    const std::string ik = init_kind;
    if (ik == "dirac") {
      init = daz::InitSpec::dirac(daz::Vec(init_params, init_params + d));
    } else if (ik == "gaussian") {
      init = daz::InitSpec::gaussian(daz::Vec(init_params, init_params + d),
                                     daz::Vec(init_params + d, init_params + 2 * d));
    } else {
      daz::fail(daz::Error::Code::InvalidArgument,
                "daz_sample_ensemble: unknown init '" + ik + "'");
    }

    const daz::Ensemble ens =
        daz::run_ensemble(spec, potential->impl, init, n_chains, seed, std::max(1, n_threads));
    std::copy(ens.states.data.begin(), ens.states.data.end(), out_states);
    if (out_failures) *out_failures = static_cast<int32_t>(ens.failures.size());
  });
}

daz_status daz_density_1d(const char* scalar_name, double lo, double hi, int32_t n,
                          double* out_values, double* out_log_partition) {
  return guarded([&] {
    daz::require(scalar_name && out_values, daz::Error::Code::InvalidArgument,
                 "daz_density_1d: null argument");
    const daz::ScalarFn f = daz::scalar_by_name(scalar_name);
    const daz::GridDensity d = daz::density_1d(f.value, lo, hi, n);
    std::copy(d.values.begin(), d.values.end(), out_values);
    if (out_log_partition) *out_log_partition = d.log_partition;
  });
}

daz_status daz_tv_distance_samples(const double* a, int32_t na, const double* b, int32_t nb,
                                   double* out) {
  return guarded([&] {
    daz::require(a && b && out, daz::Error::Code::InvalidArgument,
                 "daz_tv_distance_samples: null argument");
    const daz::Histogram ha = daz::histogram_auto(daz::Vec(a, a + na));
    const daz::Histogram hb = daz::histogram_auto(daz::Vec(b, b + nb));
    *out = daz::tv_distance(daz::DensityView::from_histogram(ha),
                            daz::DensityView::from_histogram(hb));
  });
}

daz_status daz_experiment_run(const char* config_path, const char* overrides) {
  return guarded([&] {
    daz::require(config_path != nullptr, daz::Error::Code::InvalidArgument,
                 "daz_experiment_run: null config path");
    const daz::ExperimentConfig cfg =
        daz::resolve_config(daz::load_key_values(config_path), parse_overrides(overrides));
    daz::run_experiment(cfg);
  });
}

daz_status daz_experiment_validate(const char* config_path, const char* overrides,
                                   char* diagnostics, size_t diagnostics_len, int32_t* n_errors) {
  return guarded([&] {
    daz::require(config_path != nullptr, daz::Error::Code::InvalidArgument,
                 "daz_experiment_validate: null config path");
    const daz::ExperimentConfig cfg =
        daz::resolve_config(daz::load_key_values(config_path), parse_overrides(overrides));
    std::string text;
    int errors = 0;
    for (const daz::Diagnostic& d : daz::validate_config(cfg)) {
      text += (d.error ? "error: " : "warning: ");
      text += d.message;
      text += "\n";
      if (d.error) ++errors;
    }
    copy_string(text, diagnostics, diagnostics_len);
    if (n_errors) *n_errors = errors;
  });
}

daz_status daz_experiment_list(char* names, size_t names_len) {
  return guarded([&] {
    std::string all;
    for (const std::string& n : daz::experiment_names()) {
      if (!all.empty()) all += ",";
      all += n;
    }
    copy_string(all, names, names_len);
  });
}

}  // extern "C"
