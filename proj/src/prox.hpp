#pragma once

#include <functional>
#include <optional>

#include "common.hpp"

namespace daz {

/// prox of weight*||.||_1 at Moreau parameter t: componentwise soft threshold
/// with threshold weight*t.
Vec prox_l1(const Vec& x, double weight, double t);

/// prox of z -> ||z - y||^2 / (2 sigma^2): closed form (sigma^2 x + t y) / (sigma^2 + t).
Vec prox_quadratic(const Vec& x, const Vec& y, double sigma, double t);

/// Exact minimizer of 1/2 ||u - signal||^2 + t*weight * sum |u_{i+1} - u_i|
/// by Condat's direct method (taut-string family; linear time in practice,
/// quadratic worst case).
Vec prox_tv1d(const Vec& signal, double weight, double t);

struct Tv2dResult {
  Matrix image;
  double residual = 0.0;   // max-norm change over the last outer sweep
  int sweeps = 0;
  bool converged = false;
};

/// Approximate minimizer of 1/2 ||Y - image||_F^2 + t*weight * (row TV + column TV)
/// via Dykstra splitting over the exact 1D row/column kernels.
Tv2dResult prox_tv2d_aniso(const Matrix& image, double weight, double t, double tolerance,
                           int max_sweeps = 200);

struct ApgdConfig {
  int max_iters = 500;         // K
  double initial_lipschitz = 1.0;  // L0
  int backtracking_iters = 20;     // J
  double shrink = 0.9;             // beta in (0,1)
  double grow = 2.0;               // gamma > 1
  double rel_tolerance = 1e-6;     // r
};

struct ApgdResult {
  Vec x;
  int iterations = 0;
  bool backtracking_exhausted = false;  // some iterate used all J trials
  double final_lipschitz = 0.0;
};

using SmoothValueGrad = std::function<double(const Vec&, Vec* grad)>;
using ProxHandle = std::function<Vec(double step, const Vec&)>;  // prox_{step*g}

/// Accelerated proximal gradient descent with Lipschitz backtracking:
/// extrapolation x_bar = x_k + (x_k - x_{k-1})/sqrt(2), trial
/// x_{k+1} = prox_{g/L}(x_bar - grad f(x_bar)/L), accept when the quadratic
/// upper bound holds (then L *= beta), otherwise L *= gamma and retry.
ApgdResult apgd_prox(const SmoothValueGrad& smooth_f, const ProxHandle& prox_g, const Vec& x0,
                     const ApgdConfig& config);

}  // namespace daz
