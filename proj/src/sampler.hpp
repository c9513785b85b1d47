#pragma once

#include <functional>
#include <optional>
#include <string>

#include "common.hpp"
#include "potential.hpp"

namespace daz {

enum class StepPolicy { HalfT, Lipschitz };

/// Descending Moreau levels with per-level Langevin step sizes. t_values are
/// stored ascending (t_values[0] is the final, smallest level).
struct MoreauSchedule {
  Vec t_values;
  Vec tau_values;
  int inner_steps = 1;  // K

  int levels() const { return static_cast<int>(t_values.size()); }
};

/// Loglinear levels t_n = 10^{ (n-1)/(N-1) log10(t_large/t_small) + log10(t_small) }.
/// Policy "half-t" sets tau_n = t_n / 2; "lipschitz" sets tau_n = t_n / (1 + t_n L)
/// and requires the gradient Lipschitz constant of F.
MoreauSchedule make_loglinear_schedule(double t_small, double t_large, int levels, int inner_steps,
                                       StepPolicy policy,
                                       std::optional<double> lip_grad_f = std::nullopt);

enum class SamplerKind { Ula, Myula, Ald, SkRock, Daz, DazSkRock };

SamplerKind sampler_kind_from_name(const std::string& name);
std::string sampler_kind_name(SamplerKind kind);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::Daz;
  MoreauSchedule schedule;
  double skrock_eta = 0.05;
  int skrock_stages = 5;
  double skrock_step_factor = 0.9;
  bool mean_center = false;   // project onto zero-mean states after each update
  double noise_scale = 1.0;   // 0 disables noise (deterministic debugging)
};

struct InitSpec {
  enum class Kind { Dirac, Gaussian, Custom };
  Kind kind = Kind::Dirac;
  Vec x0;
  Vec mean;
  Vec var_diag;
  Matrix custom;

  static InitSpec dirac(Vec point);
  static InitSpec gaussian(Vec mean, Vec var_diag);
  static InitSpec custom_states(Matrix states);
};

struct ChainFailure {
  int chain = 0;
  long long update = 0;
  std::string message;
};

struct Ensemble {
  Matrix states;             // n_chains x d
  long long iteration = 0;   // counted iterations (SK-ROCK updates count s each)
  uint64_t base_seed = 0;
  std::vector<uint8_t> alive;
  std::vector<ChainFailure> failures;
};

/// Called serially after initialization (counted_iteration 0) and after every
/// update, in update order.
using Recorder =
    std::function<void(long long counted_iteration, const Matrix& states,
                       const std::vector<uint8_t>& alive)>;

/// Chebyshev coefficients for the s-stage stabilized update.
struct SkrockCoeffs {
  int stages = 5;
  double eta = 0.05;
  double omega0 = 0.0;
  double omega1 = 0.0;
  double mu1 = 0.0, nu1 = 0.0, k1 = 0.0;
  Vec mu, nu, kappa;  // index j-2 for stage j in 2..s
  double stability = 0.0;  // l_s: admissible delta * L up to this value

  static SkrockCoeffs make(int stages, double eta);
};

/// Scratch buffers reused across step calls.
struct StepWorkspace {
  Vec grad, z, a, b, c;
  void resize(size_t d) {
    grad.resize(d);
    z.resize(d);
    a.resize(d);
    b.resize(d);
    c.resize(d);
  }
};

/// x - tau (grad F + v) + sqrt(2 tau) z with v the subgradient selector of G.
void ula_step(std::span<double> state, const SplitPotential& potential, double tau,
              std::span<const double> z, StepWorkspace& ws);

/// x - tau grad F - (tau/t)(x - prox_{tG}(x)) + sqrt(2 tau) z.
void moreau_langevin_step(std::span<double> state, const SplitPotential& potential, double t,
                          double tau, std::span<const double> z, StepWorkspace& ws);

/// One s-stage stochastic Runge-Kutta-Chebyshev update targeting pi^t.
void skrock_step(std::span<double> state, const SplitPotential& potential, double t, double delta,
                 const SkrockCoeffs& coeffs, std::span<const double> z, StepWorkspace& ws);

/// Largest admissible SK-ROCK step for gradient Lipschitz constant L.
double skrock_max_step(const SkrockCoeffs& coeffs, double grad_lipschitz);

/// Runs the configured sampler over n_chains parallel chains with per-chain
/// counter-based RNG streams; results are independent of n_threads. Chains
/// whose state leaves the finite range are recorded as failed and frozen.
Ensemble run_ensemble(const SamplerSpec& spec, const SplitPotential& potential,
                      const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads = 1,
                      const Recorder& recorder = {});

/// Convenience wrappers for the individual samplers.
Ensemble run_daz(const SplitPotential& potential, const MoreauSchedule& schedule,
                 const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads = 1,
                 const Recorder& recorder = {});
Ensemble run_myula(const SplitPotential& potential, double t1, double tau1, int n_iters,
                   const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads = 1,
                   const Recorder& recorder = {});
Ensemble run_ald(const SplitPotential& potential, const MoreauSchedule& schedule,
                 const InitSpec& init, int n_chains, uint64_t base_seed, int n_threads = 1,
                 const Recorder& recorder = {});

}  // namespace daz
