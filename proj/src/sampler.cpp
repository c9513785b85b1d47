#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rng.hpp"
#include "threadpool.hpp"

namespace daz {

MoreauSchedule make_loglinear_schedule(double t_small, double t_large, int levels, int inner_steps,
                                       StepPolicy policy, std::optional<double> lip_grad_f) {
  require(t_small > 0.0 && t_large > t_small, Error::Code::InvalidArgument,
          "schedule: need 0 < t_small < t_large");
  require(levels >= 2, Error::Code::InvalidArgument, "schedule: need at least 2 levels");
  require(inner_steps >= 1, Error::Code::InvalidArgument, "schedule: inner_steps >= 1");

  MoreauSchedule s;
  s.inner_steps = inner_steps;
  s.t_values.resize(levels);
  s.tau_values.resize(levels);
  const double l0 = std::log10(t_small);
  const double span = std::log10(t_large / t_small);
  for (int n = 0; n < levels; ++n) {
    const double t = std::pow(10.0, static_cast<double>(n) / (levels - 1) * span + l0);
    s.t_values[n] = t;
    if (policy == StepPolicy::HalfT) {
      s.tau_values[n] = 0.5 * t;
    } else {
      require(lip_grad_f.has_value(), Error::Code::InvalidArgument,
              "schedule: lipschitz policy requires lip_grad_f");
      s.tau_values[n] = t / (1.0 + t * (*lip_grad_f));
    }
  }
  return s;
}

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "ula") return SamplerKind::Ula;
  if (name == "myula") return SamplerKind::Myula;
  if (name == "ald") return SamplerKind::Ald;
  if (name == "skrock") return SamplerKind::SkRock;
  if (name == "daz") return SamplerKind::Daz;
  if (name == "daz-skrock") return SamplerKind::DazSkRock;
  fail(Error::Code::InvalidArgument, "unknown sampler '" + name +
                                         "' (known: ula, myula, skrock, ald, daz, daz-skrock)");
}

std::string sampler_kind_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Ula: return "ula";
    case SamplerKind::Myula: return "myula";
    case SamplerKind::Ald: return "ald";
    case SamplerKind::SkRock: return "skrock";
    case SamplerKind::Daz: return "daz";
    case SamplerKind::DazSkRock: return "daz-skrock";
  }
  return "?";
}

InitSpec InitSpec::dirac(Vec point) {
  InitSpec s;
  s.kind = Kind::Dirac;
  s.x0 = std::move(point);
  return s;
}

InitSpec InitSpec::gaussian(Vec mean, Vec var_diag) {
  InitSpec s;
  s.kind = Kind::Gaussian;
  s.mean = std::move(mean);
  s.var_diag = std::move(var_diag);
  return s;
}

InitSpec InitSpec::custom_states(Matrix states) {
  InitSpec s;
  s.kind = Kind::Custom;
  s.custom = std::move(states);
  return s;
}

SkrockCoeffs SkrockCoeffs::make(int stages, double eta) {
  require(stages >= 1, Error::Code::InvalidArgument, "skrock: stages >= 1");
  require(eta >= 0.0, Error::Code::InvalidArgument, "skrock: eta >= 0");
  SkrockCoeffs c;
  c.stages = stages;
  c.eta = eta;
  const double w0 = 1.0 + eta / (static_cast<double>(stages) * stages);
  // Chebyshev values T_j(w0) and derivative T_s'(w0).
  Vec T(stages + 1);
  T[0] = 1.0;
  if (stages >= 1) T[1] = w0;
  for (int j = 2; j <= stages; ++j) T[j] = 2.0 * w0 * T[j - 1] - T[j - 2];
  // T_s'(w0) = s * U_{s-1}(w0)
  double U_prev = 1.0, U_cur = 2.0 * w0;  // U_0, U_1
  double U = (stages == 1) ? 1.0 : U_cur;
  for (int j = 2; j < stages; ++j) {
    const double u = 2.0 * w0 * U_cur - U_prev;
    U_prev = U_cur;
    U_cur = u;
    U = u;
  }
  const double Ts_deriv = stages * U;
  const double w1 = T[stages] / Ts_deriv;
  c.omega0 = w0;
  c.omega1 = w1;
  c.mu1 = w1 / w0;
  c.nu1 = stages * w1 / 2.0;
  c.k1 = stages * w1 / w0;
  c.mu.resize(std::max(0, stages - 1));
  c.nu.resize(std::max(0, stages - 1));
  c.kappa.resize(std::max(0, stages - 1));
  for (int j = 2; j <= stages; ++j) {
    c.mu[j - 2] = 2.0 * w1 * T[j - 1] / T[j];
    c.nu[j - 2] = 2.0 * w0 * T[j - 1] / T[j];
    c.kappa[j - 2] = -T[j - 2] / T[j];
  }
  c.stability = (1.0 + w0) / w1;
  return c;
}

double skrock_max_step(const SkrockCoeffs& coeffs, double grad_lipschitz) {
  require(grad_lipschitz > 0.0, Error::Code::InvalidArgument, "skrock_max_step: L > 0 required");
  return coeffs.stability / grad_lipschitz;
}

namespace {

void check_state(std::span<const double> state, const char* who) {
  for (double v : state) {
    if (!std::isfinite(v) || std::abs(v) > 1e8)
      fail(Error::Code::Runtime, std::string(who) + ": chain diverged (state left finite range)");
  }
}

// drift of the Moreau-regularized potential: -(grad F(y) + (y - prox_{tG}(y))/t)
void moreau_drift(const SplitPotential& potential, double t, std::span<const double> y,
                  std::span<double> out, StepWorkspace& ws) {
  ProxResult pr = potential.g_prox(t, y);
  if (!pr.converged)
    fail(Error::Code::Solver,
         "prox solver did not converge (t=" + std::to_string(t) +
             ", residual=" + std::to_string(pr.residual) + ")");
  potential.f_grad(y, ws.grad);
  for (size_t i = 0; i < y.size(); ++i) out[i] = -(ws.grad[i] + (y[i] - pr.point[i]) / t);
}

}  // namespace

void ula_step(std::span<double> state, const SplitPotential& potential, double tau,
              std::span<const double> z, StepWorkspace& ws) {
  require(tau >= 0.0, Error::Code::InvalidArgument, "ula_step: tau must be nonnegative");
  check_state(state, "ula_step");
  potential.f_grad(state, ws.grad);
  potential.g_subgrad(state, ws.a);
  const double noise = std::sqrt(2.0 * tau);
  for (size_t i = 0; i < state.size(); ++i)
    state[i] += -tau * (ws.grad[i] + ws.a[i]) + noise * z[i];
  check_state(state, "ula_step");
}

void moreau_langevin_step(std::span<double> state, const SplitPotential& potential, double t,
                          double tau, std::span<const double> z, StepWorkspace& ws) {
  require(t > 0.0 && tau >= 0.0, Error::Code::InvalidArgument,
          "moreau_langevin_step: need t > 0 and tau >= 0");
  check_state(state, "moreau_langevin_step");
  ProxResult pr = potential.g_prox(t, state);
  if (!pr.converged)
    fail(Error::Code::Solver, "moreau_langevin_step: prox failed (t=" + std::to_string(t) +
                                  ", tau=" + std::to_string(tau) + ")");
  potential.f_grad(state, ws.grad);
  const double noise = std::sqrt(2.0 * tau);
  for (size_t i = 0; i < state.size(); ++i)
    state[i] += -tau * ws.grad[i] - (tau / t) * (state[i] - pr.point[i]) + noise * z[i];
  check_state(state, "moreau_langevin_step");
}

void skrock_step(std::span<double> state, const SplitPotential& potential, double t, double delta,
                 const SkrockCoeffs& coeffs, std::span<const double> z, StepWorkspace& ws) {
  require(t > 0.0 && delta > 0.0, Error::Code::InvalidArgument,
          "skrock_step: need t > 0 and delta > 0");
  check_state(state, "skrock_step");
  const size_t d = state.size();
  const double start_norm = std::max(1.0, norm2(state));
  const double noise = std::sqrt(2.0 * delta);

  // K1 = x + mu1 delta b(x + nu1 g) + k1 g, with g the scaled noise.
  Vec& k_prev2 = ws.a;  // K_{j-2}
  Vec& k_prev = ws.b;   // K_{j-1}
  Vec& y = ws.c;        // stage evaluation point
  for (size_t i = 0; i < d; ++i) {
    k_prev2[i] = state[i];
    y[i] = state[i] + coeffs.nu1 * noise * z[i];
  }
  Vec drift(d);
  moreau_drift(potential, t, y, drift, ws);
  for (size_t i = 0; i < d; ++i)
    k_prev[i] = state[i] + coeffs.mu1 * delta * drift[i] + coeffs.k1 * noise * z[i];

  for (int j = 2; j <= coeffs.stages; ++j) {
    moreau_drift(potential, t, k_prev, drift, ws);
    const double mu = coeffs.mu[j - 2], nu = coeffs.nu[j - 2], kap = coeffs.kappa[j - 2];
    for (size_t i = 0; i < d; ++i) {
      const double next = mu * delta * drift[i] + nu * k_prev[i] + kap * k_prev2[i];
      k_prev2[i] = k_prev[i];
      k_prev[i] = next;
    }
  }
  for (size_t i = 0; i < d; ++i) state[i] = k_prev[i];
  if (!all_finite(state) || norm2(state) > 1e6 * start_norm)
    fail(Error::Code::Runtime, "skrock_step: instability detected (norm growth)");
}

namespace {

struct UpdateOp {
  enum class Type { Ula, Moreau, Skrock } type = Type::Moreau;
  double t = 0.0;
  double step = 0.0;
  long long count = 1;  // counted iterations per update
};

std::vector<UpdateOp> build_plan(const SamplerSpec& spec, const SplitPotential& potential,
                                 const SkrockCoeffs& coeffs) {
  const MoreauSchedule& sch = spec.schedule;
  require(sch.levels() >= 1, Error::Code::InvalidArgument, "run_ensemble: empty schedule");
  for (int n = 0; n < sch.levels(); ++n)
    require(sch.t_values[n] > 0.0 && sch.tau_values[n] > 0.0, Error::Code::InvalidArgument,
            "run_ensemble: schedule values must be positive");
  const double lipF = potential.lip_grad_f.value_or(0.0);
  const long long total = static_cast<long long>(sch.levels()) * sch.inner_steps;
  std::vector<UpdateOp> plan;

  const auto skrock_delta = [&](double t) {
    const double L = lipF + 1.0 / t;
    return spec.skrock_step_factor * skrock_max_step(coeffs, L);
  };

  switch (spec.kind) {
    case SamplerKind::Ula:
      plan.assign(static_cast<size_t>(total),
                  UpdateOp{UpdateOp::Type::Ula, 0.0, sch.tau_values[0], 1});
      break;
    case SamplerKind::Myula:
      plan.assign(static_cast<size_t>(total),
                  UpdateOp{UpdateOp::Type::Moreau, sch.t_values[0], sch.tau_values[0], 1});
      break;
    case SamplerKind::Ald:
      for (int n = sch.levels() - 1; n >= 0; --n)
        for (int k = 0; k < sch.inner_steps; ++k)
          plan.push_back({UpdateOp::Type::Ula, 0.0, sch.tau_values[n], 1});
      break;
    case SamplerKind::Daz:
      for (int n = sch.levels() - 1; n >= 0; --n)
        for (int k = 0; k < sch.inner_steps; ++k)
          plan.push_back({UpdateOp::Type::Moreau, sch.t_values[n], sch.tau_values[n], 1});
      break;
    case SamplerKind::SkRock: {
      const long long updates = (total + coeffs.stages - 1) / coeffs.stages;
      plan.assign(static_cast<size_t>(updates),
                  UpdateOp{UpdateOp::Type::Skrock, sch.t_values[0], skrock_delta(sch.t_values[0]),
                           coeffs.stages});
      break;
    }
    case SamplerKind::DazSkRock:
      for (int n = sch.levels() - 1; n >= 0; --n)
        for (int k = 0; k < sch.inner_steps; ++k)
          plan.push_back(
              {UpdateOp::Type::Skrock, sch.t_values[n], skrock_delta(sch.t_values[n]), coeffs.stages});
      break;
  }
  return plan;
}

}  // namespace

Ensemble run_ensemble(const SamplerSpec& spec, const SplitPotential& potential,
                      const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads,
                      const Recorder& recorder) {
  require(n_chains >= 1, Error::Code::InvalidArgument, "run_ensemble: n_chains >= 1");
  const int d = potential.dim;
  const SkrockCoeffs coeffs = SkrockCoeffs::make(spec.skrock_stages, spec.skrock_eta);
  const std::vector<UpdateOp> plan = build_plan(spec, potential, coeffs);

  Ensemble ens;
  ens.base_seed = base_seed;
  ens.states = Matrix(n_chains, d);
  ens.alive.assign(n_chains, 1);

  // init
  switch (init.kind) {
    case InitSpec::Kind::Dirac:
      require(static_cast<int>(init.x0.size()) == d, Error::Code::Dimension,
              "run_ensemble: init point dimension mismatch");
      for (int c = 0; c < n_chains; ++c)
        std::copy(init.x0.begin(), init.x0.end(), ens.states.row(c));
      break;
    case InitSpec::Kind::Gaussian: {
      require(static_cast<int>(init.mean.size()) == d &&
                  static_cast<int>(init.var_diag.size()) == d,
              Error::Code::Dimension, "run_ensemble: init moment dimension mismatch");
      for (int c = 0; c < n_chains; ++c) {
        ChainRng rng(base_seed, static_cast<uint64_t>(c));
        rng.begin(ChainRng::kInit, 0);
        double* row = ens.states.row(c);
        for (int i = 0; i < d; ++i)
          row[i] = init.mean[i] + std::sqrt(init.var_diag[i]) * rng.normal();
      }
      break;
    }
    case InitSpec::Kind::Custom:
      require(init.custom.rows == n_chains && init.custom.cols == d, Error::Code::Dimension,
              "run_ensemble: custom init shape mismatch");
      ens.states = init.custom;
      break;
  }

  std::mutex failures_mu;
  ThreadPool pool(std::max(1, n_threads));
  std::vector<StepWorkspace> workspaces(pool.size());
  for (auto& ws : workspaces) ws.resize(d);

  if (recorder) recorder(0, ens.states, ens.alive);

  long long counted = 0;
  for (size_t u = 0; u < plan.size(); ++u) {
    const UpdateOp& op = plan[u];
    const auto body = [&](int c, int worker) {
      if (!ens.alive[c]) return;
      StepWorkspace& ws = workspaces[worker];
      ChainRng rng(base_seed, static_cast<uint64_t>(c));
      rng.begin(ChainRng::kStep, u);
      for (int i = 0; i < d; ++i) ws.z[i] = spec.noise_scale * rng.normal();
      auto state = ens.states.row_span(c);
      try {
        switch (op.type) {
          case UpdateOp::Type::Ula:
            ula_step(state, potential, op.step, ws.z, ws);
            break;
          case UpdateOp::Type::Moreau:
            moreau_langevin_step(state, potential, op.t, op.step, ws.z, ws);
            break;
          case UpdateOp::Type::Skrock:
            skrock_step(state, potential, op.t, op.step, coeffs, ws.z, ws);
            break;
        }
        if (spec.mean_center) {
          double m = 0.0;
          for (int i = 0; i < d; ++i) m += state[i];
          m /= d;
          for (int i = 0; i < d; ++i) state[i] -= m;
        }
      } catch (const Error& e) {
        ens.alive[c] = 0;
        std::lock_guard<std::mutex> lk(failures_mu);
        ens.failures.push_back(
            {c, static_cast<long long>(u), std::string(e.what()) + " [update " + std::to_string(u) + "]"});
      }
    };
    pool.parallel_for(n_chains, body);
    counted += op.count;
    if (recorder) recorder(counted, ens.states, ens.alive);
  }
  ens.iteration = counted;
  std::sort(ens.failures.begin(), ens.failures.end(),
            [](const ChainFailure& a, const ChainFailure& b) {
              return a.chain < b.chain || (a.chain == b.chain && a.update < b.update);
            });
  return ens;
}

Ensemble run_daz(const SplitPotential& potential, const MoreauSchedule& schedule,
                 const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads,
                 const Recorder& recorder) {
  SamplerSpec spec;
  spec.kind = SamplerKind::Daz;
  spec.schedule = schedule;
  return run_ensemble(spec, potential, init, n_chains, base_seed, n_threads, recorder);
}

Ensemble run_myula(const SplitPotential& potential, double t1, double tau1, int n_iters,
                   const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads,
                   const Recorder& recorder) {
  SamplerSpec spec;
  spec.kind = SamplerKind::Myula;
  spec.schedule.t_values = {t1};
  spec.schedule.tau_values = {tau1};
  spec.schedule.inner_steps = n_iters;
  return run_ensemble(spec, potential, init, n_chains, base_seed, n_threads, recorder);
}

Ensemble run_ald(const SplitPotential& potential, const MoreauSchedule& schedule,
                 const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads,
                 const Recorder& recorder) {
  SamplerSpec spec;
  spec.kind = SamplerKind::Ald;
  spec.schedule = schedule;
  return run_ensemble(spec, potential, init, n_chains, base_seed, n_threads, recorder);
}

}  // namespace daz
