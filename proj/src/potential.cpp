#include "potential.hpp"

#include <cmath>

#include "prox.hpp"
#include "scalar.hpp"

namespace daz {

namespace {

void check_dim(const SplitPotential& p, size_t n) {
  require(static_cast<int>(n) == p.dim, Error::Code::Dimension,
          "potential '" + p.name + "': expected dimension " + std::to_string(p.dim) + ", got " +
              std::to_string(n));
}

std::function<double(std::span<const double>)> zero_value() {
  return [](std::span<const double>) { return 0.0; };
}

std::function<void(std::span<const double>, std::span<double>)> zero_grad() {
  return [](std::span<const double>, std::span<double> out) {
    for (double& v : out) v = 0.0;
  };
}

}  // namespace

SplitEval eval_split(const SplitPotential& potential, const Vec& x) {
  check_dim(potential, x.size());
  SplitEval out;
  out.f_val = potential.f_value(x);
  out.g_val = potential.g_value(x);
  require(std::isfinite(out.f_val) && std::isfinite(out.g_val), Error::Code::Runtime,
          "potential '" + potential.name + "': non-finite energy");
  out.grad_f.resize(x.size());
  potential.f_grad(x, out.grad_f);
  return out;
}

MoreauPoint moreau_eval(const SplitPotential& potential, double t, const Vec& x) {
  require(t > 0.0, Error::Code::InvalidArgument, "moreau_eval: t must be positive");
  check_dim(potential, x.size());
  ProxResult pr = potential.g_prox(t, x);
  if (!pr.converged)
    fail(Error::Code::Solver, "moreau_eval: prox solver did not converge (residual " +
                                  std::to_string(pr.residual) + ")");
  MoreauPoint mp;
  mp.t = t;
  mp.x = x;
  mp.prox_point = std::move(pr.point);
  mp.envelope_grad.resize(x.size());
  double sq = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mp.prox_point[i];
    mp.envelope_grad[i] = d / t;
    sq += d * d;
  }
  mp.envelope_value = potential.g_value(mp.prox_point) + sq / (2.0 * t);
  return mp;
}

double moreau_time_derivative(const SplitPotential& potential, double t, const Vec& x) {
  require(t > 0.0, Error::Code::InvalidArgument, "moreau_time_derivative: t must be positive");
  check_dim(potential, x.size());
  ProxResult pr = potential.g_prox(t, x);
  if (!pr.converged)
    fail(Error::Code::Solver, "moreau_time_derivative: prox solver did not converge");
  double sq = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - pr.point[i];
    sq += d * d;
  }
  return -sq / (2.0 * t * t);
}

SplitPotential make_laplace_potential() {
  SplitPotential p;
  p.dim = 1;
  p.name = "laplace";
  p.f_value = zero_value();
  p.f_grad = zero_grad();
  p.g_value = [](std::span<const double> x) { return std::abs(x[0]); };
  p.g_prox = [](double t, std::span<const double> x) {
    ProxResult r;
    const double v = x[0];
    r.point = {v > t ? v - t : (v < -t ? v + t : 0.0)};
    return r;
  };
  p.g_subgrad = [](std::span<const double> x, std::span<double> out) { out[0] = sgn(x[0]); };
  p.lip_grad_f = 0.0;
  p.rho_g = 0.0;
  return p;
}

SplitPotential make_gaussian_potential(int dim) {
  require(dim >= 1, Error::Code::InvalidArgument, "gaussian potential: dim >= 1");
  SplitPotential p;
  p.dim = dim;
  p.name = "gaussian";
  p.f_value = zero_value();
  p.f_grad = zero_grad();
  p.g_value = [](std::span<const double> x) { return 0.5 * norm2_sq(x); };
  p.g_prox = [](double t, std::span<const double> x) {
    ProxResult r;
    r.point.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) r.point[i] = x[i] / (1.0 + t);
    return r;
  };
  p.g_subgrad = [](std::span<const double> x, std::span<double> out) {
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  };
  p.lip_grad_f = 0.0;
  p.rho_g = 0.0;
  return p;
}

SplitPotential make_gmm4_potential() {
  SplitPotential p;
  p.dim = 1;
  p.name = "gmm4";
  auto fn = std::make_shared<ScalarFn>(scalar_by_name("gmm4"));
  p.f_value = zero_value();
  p.f_grad = zero_grad();
  p.g_value = [fn](std::span<const double> x) { return fn->value(x[0]); };
  p.g_prox = [fn](double t, std::span<const double> x) {
    ProxResult r;
    r.point = {scalar_prox(*fn, t, x[0])};
    return r;
  };
  p.g_subgrad = [fn](std::span<const double> x, std::span<double> out) { out[0] = fn->deriv(x[0]); };
  p.lip_grad_f = 0.0;
  return p;
}

SplitPotential make_l1_potential(int dim, double weight) {
  require(dim >= 1 && weight > 0.0, Error::Code::InvalidArgument, "l1 potential: bad parameters");
  SplitPotential p;
  p.dim = dim;
  p.name = "l1";
  p.f_value = zero_value();
  p.f_grad = zero_grad();
  p.g_value = [weight](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return weight * s;
  };
  p.g_prox = [weight](double t, std::span<const double> x) {
    ProxResult r;
    r.point = prox_l1(Vec(x.begin(), x.end()), weight, t);
    return r;
  };
  p.g_subgrad = [weight](std::span<const double> x, std::span<double> out) {
    for (size_t i = 0; i < x.size(); ++i) out[i] = weight * sgn(x[i]);
  };
  p.lip_grad_f = 0.0;
  p.rho_g = 0.0;
  return p;
}

namespace {

double tv1d_value(std::span<const double> x) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i) s += std::abs(x[i + 1] - x[i]);
  return s;
}

// D^T sign(D x): the minimal-norm-convention subgradient of the chain TV.
void tv1d_subgrad(std::span<const double> x, std::span<double> out, double lambda) {
  for (double& v : out) v = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = sgn(x[i + 1] - x[i]);
    out[i + 1] += lambda * s;
    out[i] -= lambda * s;
  }
}

}  // namespace

SplitPotential make_tv_prior_potential(int dim, double lambda) {
  require(dim >= 2 && lambda > 0.0, Error::Code::InvalidArgument, "tv_prior potential: bad parameters");
  SplitPotential p;
  p.dim = dim;
  p.name = "tv_prior";
  p.f_value = zero_value();
  p.f_grad = zero_grad();
  p.g_value = [lambda](std::span<const double> x) { return lambda * tv1d_value(x); };
  p.g_prox = [lambda](double t, std::span<const double> x) {
    ProxResult r;
    r.point = prox_tv1d(Vec(x.begin(), x.end()), lambda, t);
    return r;
  };
  p.g_subgrad = [lambda](std::span<const double> x, std::span<double> out) {
    tv1d_subgrad(x, out, lambda);
  };
  p.lip_grad_f = 0.0;
  p.rho_g = 0.0;
  return p;
}

SplitPotential make_tv_chain_potential(const Vec& y, double sigma, double lambda) {
  require(y.size() >= 2, Error::Code::InvalidArgument, "tv_chain potential: need d >= 2");
  require(sigma > 0.0 && lambda > 0.0, Error::Code::InvalidArgument,
          "tv_chain potential: sigma and lambda must be positive");
  SplitPotential p;
  p.dim = static_cast<int>(y.size());
  p.name = "tv_chain";
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double invs2 = 1.0 / (sigma * sigma);
  auto data = std::make_shared<Vec>(y);
  p.f_value = [data, inv2s2](std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - (*data)[i];
      s += d * d;
    }
    return s * inv2s2;
  };
  p.f_grad = [data, invs2](std::span<const double> x, std::span<double> out) {
    for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - (*data)[i]) * invs2;
  };
  p.g_value = [lambda](std::span<const double> x) { return lambda * tv1d_value(x); };
  p.g_prox = [lambda](double t, std::span<const double> x) {
    ProxResult r;
    r.point = prox_tv1d(Vec(x.begin(), x.end()), lambda, t);
    return r;
  };
  p.g_subgrad = [lambda](std::span<const double> x, std::span<double> out) {
    tv1d_subgrad(x, out, lambda);
  };
  p.lip_grad_f = invs2;
  p.rho_g = 0.0;
  return p;
}

SplitPotential make_tv_image_potential(const Matrix& y, double sigma, double lambda,
                                       double prox_tolerance, int prox_max_sweeps) {
  require(y.rows >= 2 && y.cols >= 2, Error::Code::InvalidArgument,
          "tv_image potential: image must be at least 2x2");
  require(sigma > 0.0 && lambda > 0.0, Error::Code::InvalidArgument,
          "tv_image potential: sigma and lambda must be positive");
  SplitPotential p;
  const int rows = y.rows, cols = y.cols;
  p.dim = rows * cols;
  p.name = "tv_image";
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double invs2 = 1.0 / (sigma * sigma);
  auto data = std::make_shared<Matrix>(y);
  p.f_value = [data, inv2s2](std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - data->data[i];
      s += d * d;
    }
    return s * inv2s2;
  };
  p.f_grad = [data, invs2](std::span<const double> x, std::span<double> out) {
    for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - data->data[i]) * invs2;
  };
  p.g_value = [rows, cols, lambda](std::span<const double> x) {
    double s = 0.0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const double v = x[static_cast<size_t>(i) * cols + j];
        if (j + 1 < cols) s += std::abs(x[static_cast<size_t>(i) * cols + j + 1] - v);
        if (i + 1 < rows) s += std::abs(x[static_cast<size_t>(i + 1) * cols + j] - v);
      }
    return lambda * s;
  };
  p.g_prox = [rows, cols, lambda, prox_tolerance, prox_max_sweeps](double t,
                                                                   std::span<const double> x) {
    Matrix img(rows, cols);
    std::copy(x.begin(), x.end(), img.data.begin());
    Tv2dResult tv = prox_tv2d_aniso(img, lambda, t, prox_tolerance, prox_max_sweeps);
    ProxResult r;
    r.point = std::move(tv.image.data);
    r.converged = tv.converged;
    r.residual = tv.residual;
    r.iterations = tv.sweeps;
    return r;
  };
  p.g_subgrad = [rows, cols, lambda](std::span<const double> x, std::span<double> out) {
    for (double& v : out) v = 0.0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const size_t idx = static_cast<size_t>(i) * cols + j;
        if (j + 1 < cols) {
          const double s = sgn(x[idx + 1] - x[idx]);
          out[idx + 1] += lambda * s;
          out[idx] -= lambda * s;
        }
        if (i + 1 < rows) {
          const double s = sgn(x[idx + cols] - x[idx]);
          out[idx + cols] += lambda * s;
          out[idx] -= lambda * s;
        }
      }
  };
  p.lip_grad_f = invs2;
  p.rho_g = 0.0;
  return p;
}

}  // namespace daz
