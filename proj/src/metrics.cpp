#include "metrics.hpp"

#include <algorithm>
#include <cmath>

namespace daz {

namespace {

double percentile_sorted(const Vec& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = (p / 100.0) * (n - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Histogram histogram_auto(const Vec& samples) {
  require(samples.size() >= 2, Error::Code::InvalidArgument, "histogram_auto: need >= 2 samples");
  Vec sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  require(hi > lo, Error::Code::InvalidArgument, "histogram_auto: all samples identical");
  const double range = hi - lo;
  const double n = static_cast<double>(samples.size());

  const double sturges_bins = std::ceil(std::log2(n)) + 1.0;
  const double width_sturges = range / sturges_bins;
  const double iqr = percentile_sorted(sorted, 75.0) - percentile_sorted(sorted, 25.0);
  const double width_fd = 2.0 * iqr / std::cbrt(n);
  double width = width_sturges;
  if (width_fd > 0.0) width = std::min(width, width_fd);
  const int bins = std::max(1, static_cast<int>(std::ceil(range / width)));

  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + range * b / bins;
  h.densities.assign(bins, 0.0);
  const double bw = range / bins;
  for (double v : sorted) {
    int b = static_cast<int>((v - lo) / bw);
    b = std::min(std::max(b, 0), bins - 1);
    h.densities[b] += 1.0;
  }
  for (double& d : h.densities) d /= n * bw;
  return h;
}

DensityView DensityView::from_grid(const GridDensity& d) {
  DensityView v;
  v.piecewise_constant = false;
  const int n = static_cast<int>(d.values.size());
  v.xs.resize(n);
  for (int i = 0; i < n; ++i) v.xs[i] = d.node(i);
  v.vals = d.values;
  return v;
}

DensityView DensityView::from_histogram(const Histogram& h) {
  DensityView v;
  v.piecewise_constant = true;
  v.xs = h.edges;
  v.vals = h.densities;
  return v;
}

DensityView DensityView::from_marginal(const DiscreteMarginal& m) {
  DensityView v;
  v.piecewise_constant = true;
  const int L = static_cast<int>(m.probs.size());
  const double half = 0.5 * m.spacing();
  v.xs.resize(L + 1);
  v.vals.resize(L);
  for (int i = 0; i < L; ++i) {
    v.xs[i] = m.label(i) - half;
    v.vals[i] = m.probs[i] / m.spacing();
  }
  v.xs[L] = m.label(L - 1) + half;
  return v;
}

double DensityView::eval(double x) const {
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t idx = static_cast<size_t>(it - xs.begin());
  if (idx == 0) idx = 1;
  if (idx >= xs.size()) idx = xs.size() - 1;
  const size_t cell = idx - 1;
  if (piecewise_constant) return vals[cell];
  const double t = (x - xs[cell]) / (xs[cell + 1] - xs[cell]);
  return vals[cell] + t * (vals[cell + 1] - vals[cell]);
}

double DensityView::mass() const {
  double m = 0.0;
  for (size_t c = 0; c + 1 < xs.size(); ++c) {
    const double w = xs[c + 1] - xs[c];
    if (piecewise_constant)
      m += vals[c] * w;
    else
      m += 0.5 * (vals[c] + vals[c + 1]) * w;
  }
  return m;
}

double tv_distance(const DensityView& p, const DensityView& q) {
  require(!p.xs.empty() && !q.xs.empty(), Error::Code::InvalidArgument, "tv_distance: empty input");
  if (p.xs.back() <= q.xs.front() || q.xs.back() <= p.xs.front()) return 2.0;

  Vec grid;
  grid.reserve(p.xs.size() + q.xs.size());
  grid.insert(grid.end(), p.xs.begin(), p.xs.end());
  grid.insert(grid.end(), q.xs.begin(), q.xs.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // On each merged cell both densities are linear, so |p - q| integrates
  // exactly with at most one sign change.
  double total = 0.0;
  for (size_t c = 0; c + 1 < grid.size(); ++c) {
    const double a = grid[c], b = grid[c + 1];
    const double w = b - a;
    if (w <= 0.0) continue;
    // Evaluate strictly inside the cell to dodge breakpoint ambiguity.
    const double eps = 1e-12 * std::max(1.0, std::abs(a) + std::abs(b));
    const double fa = p.eval(a + eps) - q.eval(a + eps);
    const double fb = p.eval(b - eps) - q.eval(b - eps);
    if (fa * fb >= 0.0) {
      total += 0.5 * std::abs(fa + fb) * w;
    } else {
      const double x_cross = fa / (fa - fb);  // relative position in [0,1]
      total += 0.5 * (std::abs(fa) * x_cross + std::abs(fb) * (1.0 - x_cross)) * w;
    }
  }
  return total;
}

double wasserstein1_1d(const GridDensity& p, const GridDensity& q) {
  const DensityView vp = DensityView::from_grid(p);
  const DensityView vq = DensityView::from_grid(q);
  require(std::abs(vp.mass() - 1.0) <= 1e-6 && std::abs(vq.mass() - 1.0) <= 1e-6,
          Error::Code::InvalidArgument, "wasserstein1_1d: inputs must be normalized");

  Vec grid;
  grid.reserve(vp.xs.size() + vq.xs.size());
  grid.insert(grid.end(), vp.xs.begin(), vp.xs.end());
  grid.insert(grid.end(), vq.xs.begin(), vq.xs.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // CDF difference is piecewise quadratic on merged cells; Simpson per cell.
  double total = 0.0, cdf_p = 0.0, cdf_q = 0.0;
  for (size_t c = 0; c + 1 < grid.size(); ++c) {
    const double a = grid[c], b = grid[c + 1], w = b - a;
    if (w <= 0.0) continue;
    const double mid = 0.5 * (a + b);
    const double pa = vp.eval(a), pm = vp.eval(mid), pb = vp.eval(b);
    const double qa = vq.eval(a), qm = vq.eval(mid), qb = vq.eval(b);
    const double d_a = cdf_p - cdf_q;
    // trapezoid increments of each CDF to the midpoint and end
    const double cp_mid = cdf_p + 0.5 * (pa + pm) * (w / 2.0);
    const double cq_mid = cdf_q + 0.5 * (qa + qm) * (w / 2.0);
    const double cp_end = cp_mid + 0.5 * (pm + pb) * (w / 2.0);
    const double cq_end = cq_mid + 0.5 * (qm + qb) * (w / 2.0);
    const double f0 = std::abs(d_a), f1 = std::abs(cp_mid - cq_mid), f2 = std::abs(cp_end - cq_end);
    total += w / 6.0 * (f0 + 4.0 * f1 + f2);
    cdf_p = cp_end;
    cdf_q = cq_end;
  }
  return total;
}

std::vector<Vec> finite_difference_marginals(const Matrix& states) {
  require(states.cols >= 2, Error::Code::InvalidArgument,
          "finite_difference_marginals: need d >= 2");
  std::vector<Vec> out(states.cols - 1, Vec(states.rows));
  for (int i = 0; i < states.rows; ++i) {
    const double* row = states.row(i);
    for (int j = 0; j + 1 < states.cols; ++j) out[j][i] = row[j + 1] - row[j];
  }
  return out;
}

PercentileSites select_percentile_marginals(const Matrix& tv_by_site, int window, double p_low,
                                            double p_high) {
  require(tv_by_site.rows >= 1 && tv_by_site.cols >= 1, Error::Code::InvalidArgument,
          "select_percentile_marginals: empty input");
  require(window >= 1 && window <= tv_by_site.cols, Error::Code::InvalidArgument,
          "select_percentile_marginals: window exceeds recorded iterations");
  const int sites = tv_by_site.rows;
  Vec means(sites, 0.0);
  for (int s = 0; s < sites; ++s) {
    double acc = 0.0;
    for (int k = tv_by_site.cols - window; k < tv_by_site.cols; ++k) acc += tv_by_site(s, k);
    means[s] = acc / window;
  }
  Vec sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const auto pick = [&](double p) {
    const int rank =
        std::clamp(static_cast<int>(std::llround(p / 100.0 * (sites - 1))), 0, sites - 1);
    const double value = sorted[rank];
    for (int s = 0; s < sites; ++s)
      if (means[s] == value) return s;
    return 0;
  };
  PercentileSites out;
  out.low = pick(p_low);
  out.median = pick(50.0);
  out.high = pick(p_high);
  return out;
}

Vec potential_trace(const std::vector<Vec>& snapshots, const SplitPotential& potential) {
  require(!snapshots.empty(), Error::Code::InvalidArgument, "potential_trace: no snapshots");
  Vec out(snapshots.size());
  for (size_t k = 0; k < snapshots.size(); ++k) out[k] = potential.value(snapshots[k]);
  return out;
}

}  // namespace daz
