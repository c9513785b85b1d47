#include "prox.hpp"

#include <algorithm>
#include <cmath>

namespace daz {

Vec prox_l1(const Vec& x, double weight, double t) {
  require(weight > 0.0 && t > 0.0, Error::Code::InvalidArgument, "prox_l1: weight and t must be positive");
  const double thr = weight * t;
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    out[i] = (v > thr) ? v - thr : (v < -thr ? v + thr : 0.0);
  }
  return out;
}

Vec prox_quadratic(const Vec& x, const Vec& y, double sigma, double t) {
  require(x.size() == y.size(), Error::Code::Dimension, "prox_quadratic: dimension mismatch");
  require(sigma > 0.0 && t > 0.0, Error::Code::InvalidArgument, "prox_quadratic: sigma and t must be positive");
  const double s2 = sigma * sigma;
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = (s2 * x[i] + t * y[i]) / (s2 + t);
  return out;
}

// Dynamic programming on the derivative of the cost-to-go. The derivative of
// the optimal forward cost is piecewise linear and nondecreasing; each data
// term adds a unit-slope line and the coupling term clamps it to [-lam, lam].
// Knots are kept in a window of a 2n buffer with per-knot (slope, intercept)
// jumps; clamp positions tm/tp drive the backward pass.
Vec prox_tv1d(const Vec& signal, double weight, double t) {
  require(!signal.empty(), Error::Code::InvalidArgument, "prox_tv1d: empty signal");
  require(weight > 0.0 && t > 0.0, Error::Code::InvalidArgument, "prox_tv1d: weight and t must be positive");
  const int n = static_cast<int>(signal.size());
  const double lam = weight * t;
  Vec beta(signal.size());
  if (n == 1) {
    beta[0] = signal[0];
    return beta;
  }
  const Vec& y = signal;

  std::vector<double> x(2 * n), ds(2 * n), dc(2 * n);
  Vec tm(n - 1), tp(n - 1);

  // phi_1(b) = b - y0, clamped at -lam / +lam, plus the next data term.
  int l = n - 1, r = n;
  tm[0] = y[0] - lam;
  tp[0] = y[0] + lam;
  x[l] = tm[0];
  ds[l] = 1.0;
  dc[l] = -y[0] + lam;
  x[r] = tp[0];
  ds[r] = -1.0;
  dc[r] = y[0] + lam;
  double fs = 1.0, fc = -y[1] - lam;  // leftmost piece of current phi
  double ls = 1.0, lc = -y[1] + lam;  // rightmost piece of current phi

  for (int k = 1; k < n - 1; ++k) {
    // Walk in from the left until phi crosses -lam.
    double s = fs, c = fc;
    int lo = l;
    while (lo <= r && s * x[lo] + c <= -lam) {
      s += ds[lo];
      c += dc[lo];
      ++lo;
    }
    const double tmk = (-lam - c) / s;

    // Walk in from the right until phi crosses +lam.
    double s2 = ls, c2 = lc;
    int hi = r;
    while (hi >= lo && s2 * x[hi] + c2 >= lam) {
      s2 -= ds[hi];
      c2 -= dc[hi];
      --hi;
    }
    const double tpk = (lam - c2) / s2;

    l = lo - 1;
    x[l] = tmk;
    ds[l] = s;
    dc[l] = c + lam;
    r = hi + 1;
    x[r] = tpk;
    ds[r] = -s2;
    dc[r] = lam - c2;
    tm[k] = tmk;
    tp[k] = tpk;

    fs = 1.0;
    fc = -y[k + 1] - lam;
    ls = 1.0;
    lc = -y[k + 1] + lam;
  }

  // Root of the final derivative gives the last coefficient.
  double s = fs, c = fc;
  int lo = l;
  while (lo <= r && s * x[lo] + c <= 0.0) {
    s += ds[lo];
    c += dc[lo];
    ++lo;
  }
  beta[n - 1] = -c / s;
  for (int k = n - 2; k >= 0; --k) beta[k] = std::min(std::max(beta[k + 1], tm[k]), tp[k]);
  return beta;
}

Tv2dResult prox_tv2d_aniso(const Matrix& image, double weight, double t, double tolerance,
                           int max_sweeps) {
  require(image.rows >= 1 && image.cols >= 1, Error::Code::InvalidArgument, "prox_tv2d: empty image");
  require(tolerance > 0.0, Error::Code::InvalidArgument, "prox_tv2d: tolerance must be positive");
  Tv2dResult res;
  res.image = image;
  if (image.rows == 1 && image.cols == 1) {
    res.converged = true;
    return res;
  }

  // Dykstra splitting over row-wise and column-wise 1D TV.
  Matrix& xm = res.image;
  Matrix p(image.rows, image.cols, 0.0), q(image.rows, image.cols, 0.0);
  Vec buf, out;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    // rows
    for (int i = 0; i < image.rows; ++i) {
      buf.assign(xm.row(i), xm.row(i) + image.cols);
      for (int j = 0; j < image.cols; ++j) buf[j] += p(i, j);
      out = (image.cols > 1) ? prox_tv1d(buf, weight, t) : buf;
      for (int j = 0; j < image.cols; ++j) {
        p(i, j) = buf[j] - out[j];
        xm(i, j) = out[j];
      }
    }
    // columns
    for (int j = 0; j < image.cols; ++j) {
      buf.resize(image.rows);
      for (int i = 0; i < image.rows; ++i) buf[i] = xm(i, j) + q(i, j);
      out = (image.rows > 1) ? prox_tv1d(buf, weight, t) : buf;
      for (int i = 0; i < image.rows; ++i) {
        q(i, j) = buf[i] - out[i];
        change = std::max(change, std::abs(out[i] - xm(i, j)));
        xm(i, j) = out[i];
      }
    }
    res.sweeps = sweep;
    res.residual = change;
    if (change <= tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

ApgdResult apgd_prox(const SmoothValueGrad& smooth_f, const ProxHandle& prox_g, const Vec& x0,
                     const ApgdConfig& config) {
  require(config.shrink > 0.0 && config.shrink < 1.0 && config.grow > 1.0,
          Error::Code::InvalidArgument, "apgd: need 0 < beta < 1 < gamma");
  require(config.rel_tolerance > 0.0 && config.max_iters >= 1 && config.backtracking_iters >= 1,
          Error::Code::InvalidArgument, "apgd: bad config");

  const size_t d = x0.size();
  Vec x = x0, x_prev = x0, x_bar(d), grad(d), x_next(d);
  double fx0 = smooth_f(x0, nullptr);
  require(std::isfinite(fx0), Error::Code::InvalidArgument, "apgd: f not finite at x0");

  ApgdResult res;
  res.x = x0;
  double L = config.initial_lipschitz;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (int k = 0; k < config.max_iters; ++k) {
    for (size_t i = 0; i < d; ++i) x_bar[i] = x[i] + (x[i] - x_prev[i]) * inv_sqrt2;
    const double f_bar = smooth_f(x_bar, &grad);
    require(std::isfinite(f_bar) && all_finite(grad), Error::Code::Solver, "apgd: non-finite value");

    bool accepted = false;
    for (int j = 0; j < config.backtracking_iters; ++j) {
      Vec trial(d);
      for (size_t i = 0; i < d; ++i) trial[i] = x_bar[i] - grad[i] / L;
      x_next = prox_g(1.0 / L, trial);
      double lin = 0.0, quad = 0.0;
      for (size_t i = 0; i < d; ++i) {
        const double dstep = x_next[i] - x_bar[i];
        lin += grad[i] * dstep;
        quad += dstep * dstep;
      }
      const double f_next = smooth_f(x_next, nullptr);
      require(std::isfinite(f_next), Error::Code::Solver, "apgd: non-finite trial value");
      if (f_next <= f_bar + lin + 0.5 * L * quad) {
        L *= config.shrink;
        accepted = true;
        break;
      }
      L *= config.grow;
    }
    if (!accepted) res.backtracking_exhausted = true;

    double diff = 0.0, base = 0.0;
    for (size_t i = 0; i < d; ++i) {
      diff += (x[i] - x_next[i]) * (x[i] - x_next[i]);
      base += x[i] * x[i];
    }
    x_prev = x;
    x = x_next;
    res.iterations = k + 1;
    if (std::sqrt(diff) <= config.rel_tolerance * std::max(std::sqrt(base), 1e-300)) break;
  }
  res.x = x;
  res.final_lipschitz = L;
  return res;
}

}  // namespace daz
