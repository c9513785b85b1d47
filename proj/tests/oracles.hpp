#pragma once

// Independent reference solvers used only by tests. These deliberately take
// different algorithmic routes than the library code they check.

#include <functional>

#include "bp.hpp"
#include "common.hpp"

namespace daz::testing {

/// 1D TV prox by projected gradient on the dual box-constrained QP
///   min_{|u_i| <= lam} 1/2 || x - D^T u ||^2 ,   solution y = x - D^T u.
Vec tv1d_dual_oracle(const Vec& signal, double lam, int iters = 60000);

/// Anisotropic 2D TV prox by a primal-dual (Chambolle-Pock style) solve.
Matrix tv2d_pd_oracle(const Matrix& image, double lam, int iters = 20000);

/// Scalar prox by dense grid scan plus ternary refinement, independent of the
/// library's window heuristics.
double scalar_prox_grid_oracle(const std::function<double(double)>& g, double t, double x,
                               double lo, double hi, int n = 200001);

/// Exact chain marginals by brute-force enumeration over all label tuples
/// (log-domain); feasible for d <= 4 with small label counts.
MarginalSet chain_enumeration_oracle(const ChainMRFSpec& spec);

/// Exact grid marginals via row-wise transfer matrices (exhaustive over row
/// configurations); feasible for cols <= 3 and small label counts.
MarginalSet grid_transfer_oracle(const GridMRFSpec& spec);

}  // namespace daz::testing
