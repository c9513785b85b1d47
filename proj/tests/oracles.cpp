#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace daz::testing {

Vec tv1d_dual_oracle(const Vec& signal, double lam, int iters) {
  const int n = static_cast<int>(signal.size());
  if (n == 1 || lam <= 0.0) return signal;
  const int m = n - 1;
  Vec u(m, 0.0), y(n);
  const double step = 0.25;  // 1 / ||D D^T||, spectral norm < 4
  for (int it = 0; it < iters; ++it) {
    // y = x - D^T u
    for (int i = 0; i < n; ++i) y[i] = signal[i];
    for (int j = 0; j < m; ++j) {
      y[j] += u[j];
      y[j + 1] -= u[j];
    }
    // u <- clip(u + step * D y)
    for (int j = 0; j < m; ++j) {
      const double g = y[j + 1] - y[j];
      u[j] = std::clamp(u[j] + step * g, -lam, lam);
    }
  }
  for (int i = 0; i < n; ++i) y[i] = signal[i];
  for (int j = 0; j < m; ++j) {
    y[j] += u[j];
    y[j + 1] -= u[j];
  }
  return y;
}

Matrix tv2d_pd_oracle(const Matrix& image, double lam, int iters) {
  const int R = image.rows, C = image.cols;
  Matrix y = image, y_bar = image;
  Matrix uh(R, C, 0.0), uv(R, C, 0.0);  // dual variables for the two difference channels
  const double sigma = 1.0 / std::sqrt(8.0), tau = 1.0 / std::sqrt(8.0);
  for (int it = 0; it < iters; ++it) {
    // dual ascent + clip
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) {
        if (j + 1 < C) uh(i, j) = std::clamp(uh(i, j) + sigma * (y_bar(i, j + 1) - y_bar(i, j)), -lam, lam);
        if (i + 1 < R) uv(i, j) = std::clamp(uv(i, j) + sigma * (y_bar(i + 1, j) - y_bar(i, j)), -lam, lam);
      }
    // primal descent with prox of 1/2 || . - image ||^2
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) {
        double div = 0.0;
        if (j + 1 < C) div -= uh(i, j);
        if (j > 0) div += uh(i, j - 1);
        if (i + 1 < R) div -= uv(i, j);
        if (i > 0) div += uv(i - 1, j);
        const double prev = y(i, j);
        const double z = prev - tau * div;
        y(i, j) = (z + tau * image(i, j)) / (1.0 + tau);
        y_bar(i, j) = 2.0 * y(i, j) - prev;
      }
  }
  return y;
}

double scalar_prox_grid_oracle(const std::function<double(double)>& g, double t, double x,
                               double lo, double hi, int n) {
  const auto objective = [&](double v) { return g(v) + (v - x) * (v - x) / (2.0 * t); };
  const double h = (hi - lo) / (n - 1);
  int best = 0;
  double best_val = objective(lo);
  for (int i = 1; i < n; ++i) {
    const double v = objective(lo + i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(n - 1, best + 1) * h;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (objective(m1) <= objective(m2))
      b = m2;
    else
      a = m1;
  }
  return 0.5 * (a + b);
}

MarginalSet chain_enumeration_oracle(const ChainMRFSpec& spec) {
  const int d = static_cast<int>(spec.y.size());
  const int L = spec.labels;
  const double step = (spec.hi - spec.lo) / (L - 1);
  const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);

  long long combos = 1;
  for (int i = 0; i < d; ++i) {
    combos *= L;
    require(combos <= 20000000, Error::Code::InvalidArgument, "enumeration oracle: too large");
  }

  const auto label = [&](int a) { return spec.lo + a * step; };
  std::vector<Vec> joint_log(static_cast<size_t>(combos) ? 0 : 0);
  Vec logw(static_cast<size_t>(combos));
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  for (long long c = 0; c < combos; ++c) {
    long long rem = c;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % L);
      rem /= L;
    }
    double lw = 0.0;
    for (int i = 0; i < d; ++i) {
      const double v = label(idx[i]);
      lw -= (v - spec.y[i]) * (v - spec.y[i]) * inv2s2;
      if (i + 1 < d) lw -= spec.lambda * std::abs(label(idx[i + 1]) - v);
    }
    logw[static_cast<size_t>(c)] = lw;
    max_log = std::max(max_log, lw);
  }

  MarginalSet out;
  out.site_semantics = "site";
  out.marginals.assign(d, DiscreteMarginal{spec.lo, spec.hi, Vec(L, 0.0)});
  double total = 0.0;
  for (long long c = 0; c < combos; ++c) {
    const double w = std::exp(logw[static_cast<size_t>(c)] - max_log);
    total += w;
    long long rem = c;
    for (int i = 0; i < d; ++i) {
      out.marginals[i].probs[rem % L] += w;
      rem /= L;
    }
  }
  for (auto& m : out.marginals)
    for (double& p : m.probs) p /= total;
  return out;
}

MarginalSet grid_transfer_oracle(const GridMRFSpec& spec) {
  const int R = spec.y.rows, C = spec.y.cols, L = spec.labels;
  require(C <= 3 && L <= 15, Error::Code::InvalidArgument, "transfer oracle: too large");
  const double step = (spec.hi - spec.lo) / (L - 1);
  const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
  const auto label = [&](int a) { return spec.lo + a * step; };

  long long states = 1;
  for (int j = 0; j < C; ++j) states *= L;

  const auto decode = [&](long long s, int j) {
    for (int k = 0; k < j; ++k) s /= L;
    return static_cast<int>(s % L);
  };

  // log potential of one row (unaries + horizontal pairs)
  const auto row_log = [&](int i, long long s) {
    double lw = 0.0;
    for (int j = 0; j < C; ++j) {
      const double v = label(decode(s, j));
      lw -= (v - spec.y(i, j)) * (v - spec.y(i, j)) * inv2s2;
      if (j + 1 < C) lw -= spec.lambda * std::abs(label(decode(s, j + 1)) - v);
    }
    return lw;
  };
  // vertical coupling between consecutive row states
  const auto pair_log = [&](long long s_top, long long s_bot) {
    double lw = 0.0;
    for (int j = 0; j < C; ++j)
      lw -= spec.lambda * std::abs(label(decode(s_top, j)) - label(decode(s_bot, j)));
    return lw;
  };

  const auto norm = [](Vec& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) sum += std::exp(x - m);
    const double lz = m + std::log(sum);
    for (double& x : v) x -= lz;
  };

  std::vector<Vec> fwd(R, Vec(states, 0.0)), bwd(R, Vec(states, 0.0));
  for (int i = 1; i < R; ++i) {
    Vec prev(states);
    for (long long s = 0; s < states; ++s) prev[s] = row_log(i - 1, s) + fwd[i - 1][s];
    for (long long sb = 0; sb < states; ++sb) {
      double m = -std::numeric_limits<double>::infinity();
      for (long long st = 0; st < states; ++st) m = std::max(m, prev[st] + pair_log(st, sb));
      double sum = 0.0;
      for (long long st = 0; st < states; ++st) sum += std::exp(prev[st] + pair_log(st, sb) - m);
      fwd[i][sb] = m + std::log(sum);
    }
    norm(fwd[i]);
  }
  for (int i = R - 2; i >= 0; --i) {
    Vec nxt(states);
    for (long long s = 0; s < states; ++s) nxt[s] = row_log(i + 1, s) + bwd[i + 1][s];
    for (long long st = 0; st < states; ++st) {
      double m = -std::numeric_limits<double>::infinity();
      for (long long sb = 0; sb < states; ++sb) m = std::max(m, nxt[sb] + pair_log(st, sb));
      double sum = 0.0;
      for (long long sb = 0; sb < states; ++sb) sum += std::exp(nxt[sb] + pair_log(st, sb) - m);
      bwd[i][st] = m + std::log(sum);
    }
    norm(bwd[i]);
  }

  MarginalSet out;
  out.site_semantics = "site";
  out.marginals.assign(static_cast<size_t>(R) * C, DiscreteMarginal{spec.lo, spec.hi, Vec(L, 0.0)});
  for (int i = 0; i < R; ++i) {
    Vec row_post(states);
    double m = -std::numeric_limits<double>::infinity();
    for (long long s = 0; s < states; ++s) {
      row_post[s] = row_log(i, s) + fwd[i][s] + bwd[i][s];
      m = std::max(m, row_post[s]);
    }
    double total = 0.0;
    for (long long s = 0; s < states; ++s) total += std::exp(row_post[s] - m);
    for (long long s = 0; s < states; ++s) {
      const double w = std::exp(row_post[s] - m) / total;
      for (int j = 0; j < C; ++j) out.marginals[static_cast<size_t>(i) * C + j].probs[decode(s, j)] += w;
    }
  }
  return out;
}

}  // namespace daz::testing
