#include "scalar.hpp"

#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace daz {

namespace {

// Mixture experiment constants: weights, means, standard deviations.
constexpr double kGmmW[4] = {0.2, 0.2, 0.3, 0.3};
constexpr double kGmmMu[4] = {-2.0, -1.0, 1.0, 2.0};
constexpr double kGmmSigma[4] = {0.05, 0.25, 0.25, 0.1};

double gmm4_density(double x) {
  double p = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z = (x - kGmmMu[i]) / kGmmSigma[i];
    p += kGmmW[i] / (kGmmSigma[i] * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * z * z);
  }
  return p;
}

double gmm4_density_deriv(double x) {
  double dp = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z = (x - kGmmMu[i]) / kGmmSigma[i];
    dp += kGmmW[i] / (kGmmSigma[i] * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * z * z) *
          (-z / kGmmSigma[i]);
  }
  return dp;
}

// Offset so that the potential attains zero at its global minimizer (the
// sharpest mode); keeps G >= 0 without changing the Gibbs distribution.
double gmm4_offset() {
  static const double off = [] {
    double pmax = 0.0;
    for (double x = -3.0; x <= 3.0; x += 1e-4) pmax = std::max(pmax, gmm4_density(x));
    return std::log(pmax);
  }();
  return off;
}

}  // namespace

ScalarFn scalar_by_name(const std::string& name) {
  ScalarFn f;
  f.name = name;
  if (name == "abs") {
    f.value = [](double x) { return std::abs(x); };
    f.deriv = [](double x) { return sgn(x); };
    f.prox_closed_form = [](double t, double x) {
      return (x > t) ? x - t : (x < -t ? x + t : 0.0);
    };
  } else if (name == "quadratic") {
    f.value = [](double x) { return 0.5 * x * x; };
    f.deriv = [](double x) { return x; };
    f.prox_closed_form = [](double t, double x) { return x / (1.0 + t); };
  } else if (name == "zero") {
    f.value = [](double) { return 0.0; };
    f.deriv = [](double) { return 0.0; };
    f.prox_closed_form = [](double, double x) { return x; };
  } else if (name == "gmm4") {
    const double off = gmm4_offset();
    f.value = [off](double x) { return -std::log(gmm4_density(x)) + off; };
    f.deriv = [](double x) { return -gmm4_density_deriv(x) / gmm4_density(x); };
    f.prox_grid_cap = 0.01;
  } else {
    fail(Error::Code::InvalidArgument, "unknown scalar function '" + name + "' (known: " +
                                           scalar_registry_names() + ")");
  }
  return f;
}

std::string scalar_registry_names() { return "abs, quadratic, zero, gmm4"; }

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double scalar_prox(const ScalarFn& g, double t, double x) {
  require(t > 0.0, Error::Code::InvalidArgument, "scalar_prox: t must be positive");
  if (g.prox_closed_form) return g.prox_closed_form(t, x);

  const auto objective = [&](double y) {
    const double d = y - x;
    return g.value(y) + d * d / (2.0 * t);
  };
  // Any minimizer p satisfies (x-p)^2 <= 2 t (G(x) - inf G); built-ins have
  // inf G = 0, so the window below brackets the prox set.
  const double gx = g.value(x);
  require(std::isfinite(gx), Error::Code::Solver, "scalar_prox: potential not finite at anchor");
  const double w = std::sqrt(std::max(2.0 * t * gx, 0.0));
  if (w == 0.0) return x;
  const double h = std::min(w / 64.0, g.prox_grid_cap);
  const int n = std::min(100001, std::max(65, static_cast<int>(std::ceil(2.0 * w / h)) + 1));
  const double lo = x - w, hi = x + w;
  const double step = (hi - lo) / (n - 1);
  int best = 0;
  double best_val = objective(lo);
  for (int i = 1; i < n; ++i) {
    const double v = objective(lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(n - 1, best + 1) * step;
  return golden_section_min(objective, a, b);
}

double scalar_moreau(const ScalarFn& g, double t, double x) {
  const double p = scalar_prox(g, t, x);
  const double d = x - p;
  return g.value(p) + d * d / (2.0 * t);
}

double nonconvexity_estimate(const std::function<double(double)>& h, const Box1& box,
                             int n_samples, uint64_t rng_seed) {
  require(box.hi > box.lo, Error::Code::InvalidArgument, "nonconvexity_estimate: empty box");
  require(n_samples >= 0, Error::Code::InvalidArgument, "nonconvexity_estimate: bad sample count");

  double best = 0.0;
  const auto gap = [&](double x, double y, double lam) {
    return h(lam * x + (1.0 - lam) * y) - lam * h(x) - (1.0 - lam) * h(y);
  };

  const double corners[3] = {box.lo, 0.5 * (box.lo + box.hi), box.hi};
  const double lambdas[3] = {0.0, 0.5, 1.0};
  for (double x : corners)
    for (double y : corners)
      for (double lam : lambdas) best = std::max(best, gap(x, y, lam));

  // Stratified triples: sample index i picks its own substream, so the set is
  // independent of evaluation order.
  const int strata = std::max(1, static_cast<int>(std::floor(std::cbrt(double(n_samples)))));
  ChainRng rng(rng_seed, 0);
  for (int i = 0; i < n_samples; ++i) {
    rng.begin(ChainRng::kScalar, static_cast<uint64_t>(i));
    const int sx = i % strata, sy = (i / strata) % strata, sl = (i / (strata * strata)) % strata;
    const double ux = (sx + rng.uniform()) / strata;
    const double uy = (sy + rng.uniform()) / strata;
    const double ul = (sl + rng.uniform()) / strata;
    const double x = box.lo + ux * (box.hi - box.lo);
    const double y = box.lo + uy * (box.hi - box.lo);
    best = std::max(best, gap(x, y, ul));
  }
  return std::max(best, 0.0);
}

namespace {

// Composite Simpson weights over the quadrature window, accumulated through
// log-sum-exp. Returns log of Int exp(L(y)) dy.
template <typename LogIntegrand>
double log_simpson(const LogIntegrand& L, double lo, double hi, int nodes, Vec* ys = nullptr,
                   Vec* logw = nullptr) {
  if (nodes % 2 == 0) ++nodes;
  const double h = (hi - lo) / (nodes - 1);
  double max_l = -std::numeric_limits<double>::infinity();
  Vec vals(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double y = lo + i * h;
    vals[i] = L(y);
    require(!std::isnan(vals[i]), Error::Code::Solver, "quadrature: integrand not a number");
    require(vals[i] < 700.0, Error::Code::Solver, "quadrature: divergent integrand");
    max_l = std::max(max_l, vals[i]);
  }
  double acc = 0.0;
  if (ys) ys->resize(nodes);
  if (logw) logw->resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * std::exp(vals[i] - max_l);
    if (ys) (*ys)[i] = lo + i * h;
    if (logw) (*logw)[i] = vals[i];
  }
  return max_l + std::log(acc * h / 3.0);
}

}  // namespace

double diffusion_potential_1d(const ScalarFn& g, double t, double temperature, double x,
                              const QuadratureSpec& quad) {
  require(t > 0.0 && temperature > 0.0, Error::Code::InvalidArgument,
          "diffusion_potential_1d: t and temperature must be positive");
  const double width = 12.0 * std::sqrt(temperature * t) + quad.span;
  const double inv2tt = 1.0 / (2.0 * temperature * t);
  const auto L = [&](double y) {
    const double d = x - y;
    return -g.value(y) / temperature - d * d * inv2tt;
  };
  const double log_integral = log_simpson(L, x - width, x + width, quad.nodes);
  const double log_norm = -0.5 * std::log(2.0 * kPi * temperature * t);
  return -temperature * (log_norm + log_integral);
}

double diffusion_score_1d(const ScalarFn& g, double t, double temperature, double x,
                          const QuadratureSpec& quad) {
  require(t > 0.0 && temperature > 0.0, Error::Code::InvalidArgument,
          "diffusion_score_1d: t and temperature must be positive");
  const double width = 12.0 * std::sqrt(temperature * t) + quad.span;
  const double inv2tt = 1.0 / (2.0 * temperature * t);
  int nodes = quad.nodes;
  if (nodes % 2 == 0) ++nodes;
  const double lo = x - width, hi = x + width;
  const double h = (hi - lo) / (nodes - 1);

  double max_l = -std::numeric_limits<double>::infinity();
  Vec vals(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double y = lo + i * h;
    const double d = x - y;
    vals[i] = -g.value(y) / temperature - d * d * inv2tt;
    require(!std::isnan(vals[i]), Error::Code::Solver, "quadrature: integrand not a number");
    require(vals[i] < 700.0, Error::Code::Solver, "quadrature: divergent integrand");
    max_l = std::max(max_l, vals[i]);
  }
  double mass = 0.0, first_moment = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double e = w * std::exp(vals[i] - max_l);
    mass += e;
    first_moment += e * (lo + i * h);
  }
  require(mass > 0.0, Error::Code::Solver, "diffusion_score_1d: vanishing posterior mass");
  return (x - first_moment / mass) / t;
}

}  // namespace daz
