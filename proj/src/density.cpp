#include "density.hpp"

#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace daz {

GridDensity density_1d(const std::function<double(double)>& potential, double lo, double hi,
                       int n) {
  require(n >= 3 && hi > lo, Error::Code::InvalidArgument, "density_1d: bad grid");
  GridDensity d;
  d.lo = lo;
  d.hi = hi;
  d.values.resize(n);
  const double h = (hi - lo) / (n - 1);

  double umin = std::numeric_limits<double>::infinity();
  Vec u(n);
  for (int i = 0; i < n; ++i) {
    u[i] = potential(lo + i * h);
    require(std::isfinite(u[i]), Error::Code::Runtime, "density_1d: non-finite potential");
    umin = std::min(umin, u[i]);
  }
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    d.values[i] = std::exp(-(u[i] - umin));
    mass += (i == 0 || i == n - 1) ? 0.5 * d.values[i] : d.values[i];
  }
  mass *= h;
  const double peak = *std::max_element(d.values.begin(), d.values.end());
  require(d.values.front() < 1e-10 * peak && d.values.back() < 1e-10 * peak, Error::Code::Runtime,
          "density_1d: boundary mass check failed; widen the grid");
  for (double& v : d.values) v /= mass;
  d.log_partition = std::log(mass) - umin;
  return d;
}

GridDensity moreau_density_1d(const ScalarFn& g, double t, double lo, double hi, int n) {
  require(t > 0.0, Error::Code::InvalidArgument, "moreau_density_1d: t must be positive");
  return density_1d([&](double x) { return scalar_moreau(g, t, x); }, lo, hi, n);
}

std::vector<std::pair<double, double>> partition_curve(const ScalarFn& g, const Vec& t_list,
                                                       double lo, double hi, int n) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    GridDensity d = (t == 0.0) ? density_1d(g.value, lo, hi, n) : moreau_density_1d(g, t, lo, hi, n);
    out.emplace_back(t, std::exp(d.log_partition));
  }
  return out;
}

Vec sample_gmm(const Vec& weights, const Vec& means, const Vec& sigmas, int n, uint64_t seed) {
  require(weights.size() == means.size() && weights.size() == sigmas.size() && !weights.empty(),
          Error::Code::InvalidArgument, "sample_gmm: component arrays must match");
  double wsum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, Error::Code::InvalidArgument, "sample_gmm: negative weight");
    wsum += w;
  }
  require(std::abs(wsum - 1.0) <= 1e-9, Error::Code::InvalidArgument,
          "sample_gmm: weights must sum to 1");

  Vec out(n);
  ChainRng rng(seed, 0);
  for (int i = 0; i < n; ++i) {
    rng.begin(ChainRng::kData, static_cast<uint64_t>(i));
    const double u = rng.uniform();
    size_t c = 0;
    double acc = weights[0];
    while (u > acc && c + 1 < weights.size()) acc += weights[++c];
    out[i] = means[c] + sigmas[c] * rng.normal();
  }
  return out;
}

GridDensity laplace_difference_reference(double lo, double hi, int n) {
  return density_1d([](double x) { return std::abs(x); }, lo, hi, n);
}

}  // namespace daz
