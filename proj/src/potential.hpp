#pragma once

#include <functional>
#include <optional>
#include <string>

#include "common.hpp"

namespace daz {

struct ProxResult {
  Vec point;
  bool converged = true;
  double residual = 0.0;
  int iterations = 0;
};

/// The split target U = F + G: smooth F with gradient access, prox-friendly G
/// with a proximal solver and a subgradient selector. Both components map to
/// [0, inf). lip_grad_f and rho_g are caller-supplied regularity metadata and
/// are never estimated.
struct SplitPotential {
  int dim = 0;
  std::string name;

  std::function<double(std::span<const double>)> f_value;
  std::function<void(std::span<const double>, std::span<double>)> f_grad;
  std::function<double(std::span<const double>)> g_value;
  std::function<ProxResult(double t, std::span<const double>)> g_prox;
  std::function<void(std::span<const double>, std::span<double>)> g_subgrad;

  std::optional<double> lip_grad_f;
  std::optional<double> rho_g;

  double value(std::span<const double> x) const { return f_value(x) + g_value(x); }
};

struct MoreauPoint {
  double t = 0.0;
  Vec x;
  Vec prox_point;
  double envelope_value = 0.0;
  Vec envelope_grad;
};

/// F(x), G(x), grad F(x) in one call.
struct SplitEval {
  double f_val = 0.0;
  double g_val = 0.0;
  Vec grad_f;
};
SplitEval eval_split(const SplitPotential& potential, const Vec& x);

/// Envelope value, prox point and gradient (x - prox)/t of M_G^t at x.
/// Unique for t < 1/rho_g when the modulus is known; otherwise the solver's
/// converged point, one element of the prox set.
MoreauPoint moreau_eval(const SplitPotential& potential, double t, const Vec& x);

/// d/dt M_G^t(x) = -|x - prox_{tG}(x)|^2 / (2 t^2).
double moreau_time_derivative(const SplitPotential& potential, double t, const Vec& x);

/// Built-in potentials:
///   "laplace"            d=1, F=0, G=|x|
///   "gaussian"           F=0, G=||x||^2/2            (params: dim)
///   "gmm4"               d=1, F=0, G = mixture potential of the 1D experiment
///   "l1"                 F=0, G=weight*||x||_1       (params: dim, weight)
///   "tv_chain"           F=||x-y||^2/(2 sigma^2), G=lambda*TV(x)
///   "tv_image"           same with anisotropic 2D TV on rows x cols images
SplitPotential make_laplace_potential();
SplitPotential make_gaussian_potential(int dim);
SplitPotential make_gmm4_potential();
SplitPotential make_l1_potential(int dim, double weight);
SplitPotential make_tv_prior_potential(int dim, double lambda);
SplitPotential make_tv_chain_potential(const Vec& y, double sigma, double lambda);
SplitPotential make_tv_image_potential(const Matrix& y, double sigma, double lambda,
                                       double prox_tolerance = 1e-6, int prox_max_sweeps = 200);

}  // namespace daz
