#pragma once

#include "bp.hpp"
#include "common.hpp"
#include "density.hpp"
#include "potential.hpp"

namespace daz {

/// Density histogram: edges.size() == densities.size() + 1, unit mass.
struct Histogram {
  Vec edges;
  Vec densities;
};

/// Auto-binned histogram; bin count is the larger of the Sturges and
/// Freedman-Diaconis estimates over the sample range.
Histogram histogram_auto(const Vec& samples);

/// Piecewise view of a density for metric computations: piecewise constant
/// over cells (histograms, discrete marginals) or piecewise linear between
/// nodes (grid densities). Zero outside the support.
struct DensityView {
  Vec xs;    // breakpoints, increasing
  Vec vals;  // pc: xs.size()-1 cell values; pl: xs.size() node values
  bool piecewise_constant = true;

  static DensityView from_grid(const GridDensity& d);
  static DensityView from_histogram(const Histogram& h);
  static DensityView from_marginal(const DiscreteMarginal& m);
  double eval(double x) const;
  double mass() const;
};

/// Integral of |p - q| over the merged support (unnormalized convention,
/// values in [0, 2]); disjoint supports give exactly 2.
double tv_distance(const DensityView& p, const DensityView& q);

/// Integral of |CDF_p - CDF_q| on the merged grid.
double wasserstein1_1d(const GridDensity& p, const GridDensity& q);

/// Per-difference sample vectors x[:, i+1] - x[:, i].
std::vector<Vec> finite_difference_marginals(const Matrix& states);

struct PercentileSites {
  int low = 0;
  int median = 0;
  int high = 0;
};

/// Sites at the (p_low, 50, p_high) percentiles of the TV error averaged over
/// the last `window` recorded iterations; nearest-rank percentiles with ties
/// resolved to the lowest site index.
PercentileSites select_percentile_marginals(const Matrix& tv_by_site, int window,
                                            double p_low = 5.0, double p_high = 95.0);

/// U(X_k) along a trajectory of snapshots.
Vec potential_trace(const std::vector<Vec>& snapshots, const SplitPotential& potential);

struct TvTrace {
  std::vector<long long> iterations;
  Vec tv_values;
};

}  // namespace daz
