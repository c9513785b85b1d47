#include "bp.hpp"

#include <algorithm>
#include <cmath>

namespace daz {

namespace {

double logsumexp(const Vec& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void normalize_log(Vec& v) {
  const double z = logsumexp(v);
  for (double& x : v) x -= z;
}

}  // namespace

ChainMRFSpec make_chain_spec(const Vec& y, double sigma, double lambda, int labels) {
  ChainMRFSpec s;
  s.y = y;
  s.sigma = sigma;
  s.lambda = lambda;
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  s.lo = *mn - 1.0;
  s.hi = *mx + 1.0;
  s.labels = labels;
  return s;
}

MarginalSet bp_chain_marginals(const ChainMRFSpec& spec) {
  const int d = static_cast<int>(spec.y.size());
  const int L = spec.labels;
  require(d >= 1, Error::Code::InvalidArgument, "bp_chain: empty data");
  require(L >= 2 && spec.hi > spec.lo, Error::Code::InvalidArgument, "bp_chain: bad label grid");
  const double step = (spec.hi - spec.lo) / (L - 1);
  const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);

  // log unaries
  Matrix unary(d, L);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < L; ++a) {
      const double v = spec.lo + a * step;
      unary(i, a) = -(v - spec.y[i]) * (v - spec.y[i]) * inv2s2;
    }

  // pairwise in log domain depends only on |a - b|
  Vec pair_cost(L);
  for (int k = 0; k < L; ++k) pair_cost[k] = -spec.lambda * k * step;

  Matrix fwd(d, L, 0.0), bwd(d, L, 0.0);  // fwd.row(i): message into site i from the left
  Vec work(L), msg(L);
  for (int i = 1; i < d; ++i) {
    for (int a = 0; a < L; ++a) work[a] = unary(i - 1, a) + fwd(i - 1, a);
    for (int b = 0; b < L; ++b) {
      double m = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < L; ++a) m = std::max(m, work[a] + pair_cost[std::abs(a - b)]);
      double s = 0.0;
      for (int a = 0; a < L; ++a) s += std::exp(work[a] + pair_cost[std::abs(a - b)] - m);
      msg[b] = m + std::log(s);
    }
    normalize_log(msg);
    for (int b = 0; b < L; ++b) fwd(i, b) = msg[b];
  }
  for (int i = d - 2; i >= 0; --i) {
    for (int a = 0; a < L; ++a) work[a] = unary(i + 1, a) + bwd(i + 1, a);
    for (int b = 0; b < L; ++b) {
      double m = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < L; ++a) m = std::max(m, work[a] + pair_cost[std::abs(a - b)]);
      double s = 0.0;
      for (int a = 0; a < L; ++a) s += std::exp(work[a] + pair_cost[std::abs(a - b)] - m);
      msg[b] = m + std::log(s);
    }
    normalize_log(msg);
    for (int b = 0; b < L; ++b) bwd(i, b) = msg[b];
  }

  MarginalSet out;
  out.site_semantics = "site";
  out.marginals.resize(d);
  for (int i = 0; i < d; ++i) {
    Vec logm(L);
    for (int a = 0; a < L; ++a) logm[a] = unary(i, a) + fwd(i, a) + bwd(i, a);
    normalize_log(logm);
    DiscreteMarginal& m = out.marginals[i];
    m.lo = spec.lo;
    m.hi = spec.hi;
    m.probs.resize(L);
    double mass = 0.0;
    for (int a = 0; a < L; ++a) mass += (m.probs[a] = std::exp(logm[a]));
    for (double& p : m.probs) p /= mass;
  }
  return out;
}

GridMRFSpec make_grid_spec(const Matrix& y, double sigma, double lambda, int labels) {
  GridMRFSpec s;
  s.y = y;
  s.sigma = sigma;
  s.lambda = lambda;
  const auto [mn, mx] = std::minmax_element(y.data.begin(), y.data.end());
  s.lo = *mn - 1.0;
  s.hi = *mx + 1.0;
  s.labels = labels;
  return s;
}

namespace {

// out(b) = sum_a h(a) r^{|a-b|} via two geometric scans; exact for the
// |.|-difference kernel and O(L).
void geometric_convolve(const Vec& h, double r, Vec& out) {
  const int L = static_cast<int>(h.size());
  out.assign(L, 0.0);
  double acc = 0.0;
  for (int b = 0; b < L; ++b) {
    acc = acc * r + h[b];
    out[b] = acc;
  }
  acc = 0.0;
  for (int b = L - 1; b >= 0; --b) {
    acc = acc * r + h[b];
    out[b] += acc - h[b];
  }
}

}  // namespace

MarginalSet bp_grid_marginals(const GridMRFSpec& spec, double damping, int max_sweeps) {
  const int R = spec.y.rows, C = spec.y.cols, L = spec.labels;
  require(R >= 1 && C >= 1, Error::Code::InvalidArgument, "bp_grid: empty grid");
  require(L >= 2 && spec.hi > spec.lo, Error::Code::InvalidArgument, "bp_grid: bad label grid");
  require(damping >= 0.0 && damping < 1.0, Error::Code::InvalidArgument, "bp_grid: damping in [0,1)");
  const double step = (spec.hi - spec.lo) / (L - 1);
  const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
  const double r = std::exp(-spec.lambda * step);
  const int n = R * C;

  // unaries, max-normalized in the linear domain
  Matrix unary(n, L);
  for (int i = 0; i < n; ++i) {
    const double yi = spec.y.data[i];
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < L; ++a) {
      const double v = spec.lo + a * step;
      const double c = (v - yi) * (v - yi) * inv2s2;
      best = std::min(best, c);
    }
    for (int a = 0; a < L; ++a) {
      const double v = spec.lo + a * step;
      unary(i, a) = std::exp(-((v - yi) * (v - yi) * inv2s2 - best));
    }
  }

  // messages indexed by (site, direction): 0 left, 1 right, 2 up, 3 down
  // msg[dir] holds the message INTO each site from that direction.
  const int dr[4] = {0, 0, -1, 1};
  const int dc[4] = {-1, 1, 0, 0};
  std::vector<Matrix> msg(4, Matrix(n, L, 1.0 / L));
  std::vector<Matrix> msg_new(4, Matrix(n, L, 0.0));

  Vec h(L), conv(L);
  MarginalSet out;
  out.approximate = true;
  out.site_semantics = "site";

  double max_change = std::numeric_limits<double>::infinity();
  int sweep = 0;
  for (sweep = 1; sweep <= max_sweeps; ++sweep) {
    max_change = 0.0;
    for (int dir = 0; dir < 4; ++dir) {
      // message into (i,j) from its neighbor in direction dir
      for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
          const int dst = i * C + j;
          const int si = i + dr[dir], sj = j + dc[dir];
          if (si < 0 || si >= R || sj < 0 || sj >= C) {
            for (int a = 0; a < L; ++a) msg_new[dir](dst, a) = 1.0 / L;
            continue;
          }
          const int src = si * C + sj;
          // product of unary and incoming messages at src, except from dst
          const int opposite = dir ^ 1;  // 0<->1, 2<->3
          double hmax = 0.0;
          for (int a = 0; a < L; ++a) {
            double v = unary(src, a);
            for (int d2 = 0; d2 < 4; ++d2) {
              if (d2 == opposite) continue;
              v *= msg[d2](src, a);
            }
            h[a] = v;
            hmax = std::max(hmax, v);
          }
          require(hmax > 0.0, Error::Code::Runtime, "bp_grid: message underflow");
          for (int a = 0; a < L; ++a) h[a] /= hmax;
          geometric_convolve(h, r, conv);
          double s = 0.0;
          for (int a = 0; a < L; ++a) s += conv[a];
          for (int a = 0; a < L; ++a) {
            const double nv = (1.0 - damping) * (conv[a] / s) + damping * msg[dir](dst, a);
            max_change = std::max(max_change, std::abs(nv - msg[dir](dst, a)));
            msg_new[dir](dst, a) = nv;
          }
        }
      }
    }
    for (int dir = 0; dir < 4; ++dir) std::swap(msg[dir], msg_new[dir]);
    if (max_change < 1e-6) break;
  }
  out.converged = max_change < 1e-6;
  out.residual = max_change;
  out.sweeps = std::min(sweep, max_sweeps);

  out.marginals.resize(n);
  for (int i = 0; i < n; ++i) {
    DiscreteMarginal& m = out.marginals[i];
    m.lo = spec.lo;
    m.hi = spec.hi;
    m.probs.resize(L);
    double mass = 0.0;
    for (int a = 0; a < L; ++a) {
      double v = unary(i, a);
      for (int d2 = 0; d2 < 4; ++d2) v *= msg[d2](i, a);
      mass += (m.probs[a] = v);
    }
    require(mass > 0.0, Error::Code::Runtime, "bp_grid: marginal underflow");
    for (double& p : m.probs) p /= mass;
  }
  return out;
}

}  // namespace daz
