#pragma once

#include <functional>
#include <utility>

#include "common.hpp"
#include "scalar.hpp"

namespace daz {

/// A normalized density tabulated on a uniform grid; trapezoid mass is 1.
struct GridDensity {
  double lo = 0.0;
  double hi = 0.0;
  Vec values;
  double log_partition = 0.0;

  double dx() const { return (hi - lo) / (static_cast<int>(values.size()) - 1); }
  double node(int i) const { return lo + i * dx(); }
};

/// Normalized exp(-U) on [lo, hi] with n nodes; rejects grids whose boundary
/// carries mass above 1e-10 of the peak.
GridDensity density_1d(const std::function<double(double)>& potential, double lo, double hi,
                       int n);

/// density_1d applied to the Moreau envelope of g at parameter t (numeric 1D prox).
GridDensity moreau_density_1d(const ScalarFn& g, double t, double lo, double hi, int n);

/// (t, Z_t) pairs for the envelope family of g; t = 0 means the base potential.
std::vector<std::pair<double, double>> partition_curve(const ScalarFn& g, const Vec& t_list,
                                                       double lo, double hi, int n);

/// Exact i.i.d. Gaussian-mixture samples; sigmas are standard deviations.
Vec sample_gmm(const Vec& weights, const Vec& means, const Vec& sigmas, int n, uint64_t seed);

/// The density proportional to exp(-|x|) on a grid (finite-difference reference).
GridDensity laplace_difference_reference(double lo, double hi, int n);

}  // namespace daz
