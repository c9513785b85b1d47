#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "common.hpp"

namespace daz {

/// A scalar potential on R used by the 1D reference machinery: quadrature
/// densities, zero-temperature checks, and nonconvexity estimates.
/// Handles are registered built-ins selected by name in experiment configs.
struct ScalarFn {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> deriv;  // a subgradient selector where kinked
  // Closed-form prox when available; otherwise the grid solver below is used.
  std::function<double(double t, double x)> prox_closed_form;
  // Scan settings for the numeric prox (window resolution cap).
  double prox_grid_cap = 0.01;
};

/// Built-ins: "abs", "quadratic", "zero", "gmm4" (the four-component mixture
/// potential of the mixture experiment, offset so min G = 0).
ScalarFn scalar_by_name(const std::string& name);

/// Set of registered names, comma separated (for diagnostics).
std::string scalar_registry_names();

/// prox_{tG}(x) for a scalar handle. Closed form when available, otherwise a
/// bracketing grid scan over the window |y - x| <= sqrt(2 t G(x)) followed by
/// golden-section refinement (tolerance 1e-10). For multimodal G with large t
/// this returns the scanned global candidate's basin minimizer, one element
/// of the prox set.
double scalar_prox(const ScalarFn& g, double t, double x);

/// Moreau envelope value via scalar_prox.
double scalar_moreau(const ScalarFn& g, double t, double x);

struct Box1 {
  double lo = 0.0;
  double hi = 0.0;
};

/// Monte-Carlo lower estimate of the nonconvexity functional
/// sup H(l x + (1-l) y) - l H(x) - (1-l) H(y), clipped at zero.
/// Deterministic for a fixed seed; the corner set {lo, mid, hi} x {0, 1/2, 1}
/// is always included.
double nonconvexity_estimate(const std::function<double(double)>& h, const Box1& box,
                             int n_samples, uint64_t rng_seed);

struct QuadratureSpec {
  double span = 12.0;  // widening of the window beyond x +- 12 sqrt(T t)
  int nodes = 4001;    // composite Simpson nodes (odd)
};

/// Temperature-T smoothed potential
///   G_T^t(x) = -T log( (2 pi T t)^{-1/2} Int exp(-G(y)/T - (x-y)^2/(2 T t)) dy )
/// by composite Simpson accumulated in the log domain.
double diffusion_potential_1d(const ScalarFn& g, double t, double temperature, double x,
                              const QuadratureSpec& quad = {});

/// Gradient of the above via the posterior-mean identity
///   (x - E[Y | x]) / t with Y ~ rho_T(y|x).
double diffusion_score_1d(const ScalarFn& g, double t, double temperature, double x,
                          const QuadratureSpec& quad = {});

/// Golden-section minimization on [lo, hi] for unimodal f; tolerance on x.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

}  // namespace daz
