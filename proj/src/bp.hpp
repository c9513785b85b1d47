#pragma once

#include <string>

#include "common.hpp"

namespace daz {

/// Discrete distribution over a uniform label grid [lo, hi] with L points.
struct DiscreteMarginal {
  double lo = 0.0;
  double hi = 0.0;
  Vec probs;

  double spacing() const { return (hi - lo) / (static_cast<int>(probs.size()) - 1); }
  double label(int i) const { return lo + i * spacing(); }
};

struct MarginalSet {
  std::vector<DiscreteMarginal> marginals;
  std::string site_semantics;  // "site" or "difference"
  bool approximate = false;
  bool converged = true;
  double residual = 0.0;
  int sweeps = 0;
};

/// Chain MRF: unary exp(-(x_i - y_i)^2 / (2 sigma^2)), pairwise
/// exp(-lambda |x_{i+1} - x_i|) discretized on the label grid.
struct ChainMRFSpec {
  Vec y;
  double sigma = 1.0;
  double lambda = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  int labels = 501;
};

/// Default label grid [min(y) - 1, max(y) + 1] with 501 labels.
ChainMRFSpec make_chain_spec(const Vec& y, double sigma, double lambda, int labels = 501);

/// Exact sum-product forward/backward marginals of the discretized chain,
/// log-domain messages, O(d L^2).
MarginalSet bp_chain_marginals(const ChainMRFSpec& spec);

struct GridMRFSpec {
  Matrix y;
  double sigma = 1.0;
  double lambda = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  int labels = 101;
};

GridMRFSpec make_grid_spec(const Matrix& y, double sigma, double lambda, int labels = 101);

/// Damped loopy sum-product on the 4-connected grid. Marginals are flagged
/// approximate; non-convergence is reported through the flags, marginals are
/// still returned.
MarginalSet bp_grid_marginals(const GridMRFSpec& spec, double damping = 0.5, int max_sweeps = 200);

}  // namespace daz
