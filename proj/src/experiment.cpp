#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bp.hpp"
#include "csv.hpp"
#include "density.hpp"
#include "metrics.hpp"
#include "potential.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "scalar.hpp"

namespace daz {

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path out;
  int threads = 1;
  RunResult result;

  void csv(const std::string& rel, const std::vector<std::string>& header,
           const std::vector<Vec>& rows) {
    const std::string path = (out / rel).string();
    write_csv(path, header, rows);
    std::map<std::string, std::string> meta = cfg.kv;
    meta["version"] = kVersion;
    write_meta(path + ".meta", meta);
    result.files.push_back(path);
  }
};

long long recorder_stride(const ExperimentConfig& cfg, long long total) {
  if (!cfg.has("recorder")) return 1;
  const std::string& r = cfg.str("recorder");
  if (r == "full") return 1;
  if (r == "summary") return total;
  if (r.rfind("strided:", 0) == 0) {
    const long long m = std::stoll(r.substr(8));
    require(m >= 1, Error::Code::Config, "recorder stride must be >= 1");
    return m;
  }
  fail(Error::Code::Config, "unknown recorder policy '" + r + "'");
}

SamplerSpec make_spec(const ExperimentConfig& cfg, SamplerKind kind, const MoreauSchedule& sch) {
  SamplerSpec spec;
  spec.kind = kind;
  spec.schedule = sch;
  if (cfg.has("skrock_eta")) spec.skrock_eta = cfg.num("skrock_eta");
  if (cfg.has("skrock_stages")) spec.skrock_stages = static_cast<int>(cfg.integer("skrock_stages"));
  if (cfg.has("skrock_step_factor")) spec.skrock_step_factor = cfg.num("skrock_step_factor");
  return spec;
}

MoreauSchedule schedule_from_config(const ExperimentConfig& cfg) {
  const StepPolicy policy =
      cfg.str("step_policy") == "lipschitz" ? StepPolicy::Lipschitz : StepPolicy::HalfT;
  std::optional<double> lip;
  if (policy == StepPolicy::Lipschitz) {
    // Only data-fidelity experiments carry a Lipschitz constant.
    if (cfg.has("sigma")) {
      const double s = cfg.num("sigma");
      lip = 1.0 / (s * s);
    }
  }
  return make_loglinear_schedule(cfg.num("t_small"), cfg.num("t_large"),
                                 static_cast<int>(cfg.integer("levels")),
                                 static_cast<int>(cfg.integer("inner_steps")), policy, lip);
}

Vec alive_column(const Matrix& states, const std::vector<uint8_t>& alive, int col) {
  Vec v;
  v.reserve(states.rows);
  for (int c = 0; c < states.rows; ++c)
    if (alive[c]) v.push_back(states(c, col));
  return v;
}

Vec alive_difference(const Matrix& states, const std::vector<uint8_t>& alive, int site) {
  Vec v;
  v.reserve(states.rows);
  for (int c = 0; c < states.rows; ++c)
    if (alive[c]) v.push_back(states(c, site + 1) - states(c, site));
  return v;
}

// Negative-log histogram curve (bin centers with positive density).
std::vector<Vec> neglog_curve(const Histogram& h) {
  std::vector<Vec> rows;
  for (size_t b = 0; b < h.densities.size(); ++b) {
    if (h.densities[b] <= 0.0) continue;
    rows.push_back({0.5 * (h.edges[b] + h.edges[b + 1]), -std::log(h.densities[b])});
  }
  return rows;
}

// ---------------------------------------------------------------------------

void run_moreau_sweep(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ScalarFn g = scalar_by_name(cfg.str("potential"));
  const int levels = static_cast<int>(cfg.integer("levels"));
  const double t_small = cfg.num("t_small"), t_large = cfg.num("t_large");
  Vec ts(levels);
  for (int n = 0; n < levels; ++n)
    ts[n] = std::pow(10.0, static_cast<double>(n) / (levels - 1) * std::log10(t_large / t_small) +
                               std::log10(t_small));

  const double lo = cfg.num("grid_lo"), hi = cfg.num("grid_hi");
  const int gn = static_cast<int>(cfg.integer("grid_n"));
  std::vector<std::string> header = {"x"};
  for (double t : ts) header.push_back("t=" + format_number(t));

  std::vector<Vec> env_rows(gn), boltz_rows(gn);
  for (int i = 0; i < gn; ++i) {
    const double x = lo + (hi - lo) * i / (gn - 1);
    Vec row = {x}, brow = {x};
    for (double t : ts) {
      const double m = scalar_moreau(g, t, x);
      row.push_back(m);
      brow.push_back(std::exp(-m));
    }
    env_rows[i] = std::move(row);
    boltz_rows[i] = std::move(brow);
  }
  ctx.csv("envelope.csv", header, env_rows);
  ctx.csv("boltzmann.csv", header, boltz_rows);

  // Partition curve on a widened grid so the boundary-mass check passes for
  // large Moreau parameters.
  const double plo = cfg.num("partition_lo"), phi = cfg.num("partition_hi");
  const int pn = static_cast<int>(cfg.integer("partition_n"));
  std::vector<Vec> zrows;
  for (double t : ts) {
    const double widen = 12.0 * std::sqrt(t);
    GridDensity d = moreau_density_1d(g, t, plo - widen, phi + widen, pn);
    zrows.push_back({t, std::exp(d.log_partition)});
  }
  ctx.csv("partition.csv", {"t", "Z"}, zrows);
}

void run_laplace_moreau(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ScalarFn abs_fn = scalar_by_name("abs");
  const double lo = cfg.num("grid_lo"), hi = cfg.num("grid_hi");
  const int gn = static_cast<int>(cfg.integer("grid_n"));
  const Vec t_list = cfg.num_list("t_list");
  const Vec tau_list = cfg.num_list("tau_list");
  const int n_chains = static_cast<int>(cfg.integer("n_chains"));
  const int n_iters = static_cast<int>(cfg.integer("n_iters"));
  const uint64_t seed = static_cast<uint64_t>(cfg.integer("base_seed"));

  const GridDensity target = density_1d(abs_fn.value, lo, hi, gn);
  const DensityView target_view = DensityView::from_grid(target);
  {
    std::vector<Vec> rows(gn);
    for (int i = 0; i < gn; ++i) rows[i] = {target.node(i), target.values[i]};
    ctx.csv("reference_density.csv", {"x", "value"}, rows);
  }

  const SplitPotential pot = make_laplace_potential();
  std::vector<std::string> header = {"t", "quadrature", "tau_half"};
  for (double tau : tau_list) header.push_back("tau_" + format_number(tau));

  std::vector<Vec> rows;
  for (double t : t_list) {
    Vec row = {t};
    GridDensity smoothed = moreau_density_1d(abs_fn, t, lo, hi, gn);
    row.push_back(tv_distance(DensityView::from_grid(smoothed), target_view));

    Vec taus = {0.5 * t};
    taus.insert(taus.end(), tau_list.begin(), tau_list.end());
    for (double tau : taus) {
      Ensemble ens = run_myula(pot, t, tau, n_iters, InitSpec::gaussian({0.0}, {1.0}), n_chains,
                               seed, ctx.threads);
      const Vec samples = alive_column(ens.states, ens.alive, 0);
      row.push_back(tv_distance(DensityView::from_histogram(histogram_auto(samples)), target_view));
    }
    rows.push_back(std::move(row));
  }
  ctx.csv("tv_vs_t.csv", header, rows);
}

void run_gmm(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ScalarFn g = scalar_by_name("gmm4");
  const double lo = cfg.num("grid_lo"), hi = cfg.num("grid_hi");
  const int gn = static_cast<int>(cfg.integer("grid_n"));
  const int n_chains = static_cast<int>(cfg.integer("n_chains"));
  const uint64_t seed = static_cast<uint64_t>(cfg.integer("base_seed"));
  const MoreauSchedule sch = schedule_from_config(cfg);
  const long long stride = recorder_stride(cfg, static_cast<long long>(sch.levels()) * sch.inner_steps);

  const GridDensity target = density_1d(g.value, lo, hi, gn);
  const DensityView target_view = DensityView::from_grid(target);
  {
    std::vector<Vec> rows(gn);
    for (int i = 0; i < gn; ++i) rows[i] = {target.node(i), target.values[i]};
    ctx.csv("reference_density.csv", {"x", "value"}, rows);
  }

  // Ground-truth sample floor at the ensemble size (direct mixture sampling).
  const Vec gt = sample_gmm({0.2, 0.2, 0.3, 0.3}, {-2.0, -1.0, 1.0, 2.0}, {0.05, 0.25, 0.25, 0.1},
                            n_chains, splitmix64(seed ^ 0x6774f00dULL));
  const double gt_floor =
      tv_distance(DensityView::from_histogram(histogram_auto(gt)), target_view);

  const SplitPotential pot = make_gmm4_potential();
  const long long total = static_cast<long long>(sch.levels()) * sch.inner_steps;

  struct InitCase {
    const char* dir;
    InitSpec init;
  };
  const std::vector<InitCase> inits = {{"rand_init", InitSpec::gaussian({0.0}, {1.0})},
                                       {"zero_init", InitSpec::dirac({0.0})}};
  for (const InitCase& ic : inits) {
    ctx.csv(std::string(ic.dir) + "/gt_floor.csv", {"Iterations", "tv"},
            {{0.0, gt_floor}, {static_cast<double>(total), gt_floor}});
    for (const std::string& name : cfg.list("samplers")) {
      const SamplerKind kind = sampler_kind_from_name(name);
      SamplerSpec spec = make_spec(cfg, kind, sch);
      std::vector<Vec> trace;
      const Recorder rec = [&](long long counted, const Matrix& states,
                               const std::vector<uint8_t>& alive) {
        if (counted % stride != 0 && counted != total) return;
        const Vec samples = alive_column(states, alive, 0);
        if (samples.size() < 2) return;
        const double tv =
            tv_distance(DensityView::from_histogram(histogram_auto(samples)), target_view);
        trace.push_back({static_cast<double>(counted), tv});
      };
      run_ensemble(spec, pot, ic.init, n_chains, seed, ctx.threads, rec);
      ctx.csv(std::string(ic.dir) + "/" + name + "/tv_distance.csv", {"Iterations", "tv"}, trace);
    }
  }
}

void run_tv_prior(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int dim = static_cast<int>(cfg.integer("dim"));
  const double lambda = cfg.num("lambda");
  const bool full_scale = cfg.flag("full_scale");
  const int n_chains = static_cast<int>(full_scale ? cfg.integer("full_scale_chains")
                                                   : cfg.integer("n_chains"));
  const uint64_t seed = static_cast<uint64_t>(cfg.integer("base_seed"));
  const MoreauSchedule sch = schedule_from_config(cfg);
  const long long total = static_cast<long long>(sch.levels()) * sch.inner_steps;
  const long long stride = recorder_stride(cfg, total);

  const GridDensity ref = laplace_difference_reference(cfg.num("ref_lo"), cfg.num("ref_hi"),
                                                       static_cast<int>(cfg.integer("ref_n")));
  const DensityView ref_view = DensityView::from_grid(ref);

  const SplitPotential pot = make_tv_prior_potential(dim, lambda);
  const InitSpec init = InitSpec::gaussian(Vec(dim, 0.0), Vec(dim, cfg.num("init_var")));
  const int sites = dim - 1;

  {
    // True negative-log difference density, for overlay plots.
    std::vector<Vec> rows;
    for (int i = 0; i <= 160; ++i) {
      const double x = -4.0 + 8.0 * i / 160.0;
      rows.push_back({x, std::abs(x) + std::log(2.0)});
    }
    ctx.csv("marginals_gt.csv", {"x", "y"}, rows);
  }

  for (const std::string& name : cfg.list("samplers")) {
    const SamplerKind kind = sampler_kind_from_name(name);
    SamplerSpec spec = make_spec(cfg, kind, sch);
    spec.mean_center = true;

    std::vector<long long> iters;
    std::vector<Vec> tv_records;  // one row per record: sites values
    Matrix final_states;
    std::vector<uint8_t> final_alive;
    const Recorder rec = [&](long long counted, const Matrix& states,
                             const std::vector<uint8_t>& alive) {
      if (counted == total) {
        final_states = states;
        final_alive = alive;
      }
      if (counted % stride != 0 && counted != total) return;
      Vec row(sites);
      for (int s = 0; s < sites; ++s) {
        const Vec diffs = alive_difference(states, alive, s);
        row[s] = tv_distance(DensityView::from_histogram(histogram_auto(diffs)), ref_view);
      }
      iters.push_back(counted);
      tv_records.push_back(std::move(row));
    };
    run_ensemble(spec, pot, init, n_chains, seed, ctx.threads, rec);

    Matrix tv_by_site(sites, static_cast<int>(tv_records.size()));
    for (int s = 0; s < sites; ++s)
      for (size_t k = 0; k < tv_records.size(); ++k) tv_by_site(s, k) = tv_records[k][s];
    const int window = std::min<int>(static_cast<int>(cfg.integer("window")),
                                     static_cast<int>(tv_records.size()));
    const PercentileSites sel = select_percentile_marginals(tv_by_site, window, 5.0, 95.0);

    std::vector<Vec> rows;
    for (size_t k = 0; k < tv_records.size(); ++k)
      rows.push_back({static_cast<double>(iters[k]), tv_by_site(sel.low, k),
                      tv_by_site(sel.median, k), tv_by_site(sel.high, k)});
    ctx.csv(name + "/tv_distance.csv", {"Iterations", "0.05", "0.5", "0.95"}, rows);

    const auto curve = [&](int site) {
      return neglog_curve(histogram_auto(alive_difference(final_states, final_alive, site)));
    };
    ctx.csv(name + "/marginals_05.csv", {"x", "y"}, curve(sel.low));
    ctx.csv(name + "/marginals_5.csv", {"x", "y"}, curve(sel.median));
    ctx.csv(name + "/marginals_95.csv", {"x", "y"}, curve(sel.high));
  }
}

void write_marginal_set(Context& ctx, const std::string& rel, const MarginalSet& set) {
  std::vector<Vec> rows;
  for (size_t s = 0; s < set.marginals.size(); ++s) {
    const DiscreteMarginal& m = set.marginals[s];
    for (size_t a = 0; a < m.probs.size(); ++a)
      rows.push_back({static_cast<double>(s), m.label(static_cast<int>(a)), m.probs[a]});
  }
  ctx.csv(rel, {"site", "x", "value"}, rows);
}

void run_tv_sites(Context& ctx, const SplitPotential& pot, const InitSpec& init,
                  const MarginalSet& reference, int sites) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int n_chains = static_cast<int>(cfg.integer("n_chains"));
  const uint64_t seed = static_cast<uint64_t>(cfg.integer("base_seed"));
  const MoreauSchedule sch = schedule_from_config(cfg);
  const long long total = static_cast<long long>(sch.levels()) * sch.inner_steps;
  const long long stride = recorder_stride(cfg, total);

  std::vector<DensityView> ref_views(sites);
  for (int s = 0; s < sites; ++s)
    ref_views[s] = DensityView::from_marginal(reference.marginals[s]);

  for (const std::string& name : cfg.list("samplers")) {
    const SamplerKind kind = sampler_kind_from_name(name);
    SamplerSpec spec = make_spec(cfg, kind, sch);

    std::vector<long long> iters;
    std::vector<Vec> tv_records;
    std::vector<Vec> potential_rows;
    Vec chain0(pot.dim);
    const Recorder rec = [&](long long counted, const Matrix& states,
                             const std::vector<uint8_t>& alive) {
      std::copy(states.row(0), states.row(0) + pot.dim, chain0.begin());
      potential_rows.push_back({static_cast<double>(counted), pot.value(chain0)});
      if (counted % stride != 0 && counted != total) return;
      Vec row(sites);
      for (int s = 0; s < sites; ++s) {
        const Vec samples = alive_column(states, alive, s);
        row[s] = tv_distance(DensityView::from_histogram(histogram_auto(samples)), ref_views[s]);
      }
      iters.push_back(counted);
      tv_records.push_back(std::move(row));
    };
    run_ensemble(spec, pot, init, n_chains, seed, ctx.threads, rec);

    Matrix tv_by_site(sites, static_cast<int>(tv_records.size()));
    for (int s = 0; s < sites; ++s)
      for (size_t k = 0; k < tv_records.size(); ++k) tv_by_site(s, k) = tv_records[k][s];
    const int window = std::min<int>(static_cast<int>(cfg.integer("window")),
                                     static_cast<int>(tv_records.size()));
    const PercentileSites sel = select_percentile_marginals(tv_by_site, window, 5.0, 95.0);

    std::vector<Vec> rows;
    for (size_t k = 0; k < tv_records.size(); ++k)
      rows.push_back({static_cast<double>(iters[k]), tv_by_site(sel.low, k),
                      tv_by_site(sel.median, k), tv_by_site(sel.high, k)});
    ctx.csv(name + "/tv_distance.csv", {"Iterations", "0.05", "0.5", "0.95"}, rows);
    ctx.csv(name + "/potential_trace.csv", {"Iterations", "U"}, potential_rows);
  }
}

void run_tv_chain(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const double sigma = cfg.num("sigma"), lambda = cfg.num("lambda");
  const int dim = static_cast<int>(cfg.integer("dim"));
  const Vec y = generate_chain_data(static_cast<uint64_t>(cfg.integer("data_seed")), sigma, dim);

  const SplitPotential pot = make_tv_chain_potential(y, sigma, lambda);
  const ChainMRFSpec spec = make_chain_spec(y, sigma, lambda, static_cast<int>(cfg.integer("labels")));
  const MarginalSet reference = bp_chain_marginals(spec);
  write_marginal_set(ctx, "bp_marginals.csv", reference);
  {
    std::vector<Vec> rows(y.size());
    for (size_t i = 0; i < y.size(); ++i) rows[i] = {static_cast<double>(i), y[i]};
    ctx.csv("data.csv", {"site", "value"}, rows);
  }

  run_tv_sites(ctx, pot, InitSpec::dirac(Vec(dim, 0.0)), reference, dim);
}

void run_tv_image(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const double sigma = cfg.num("sigma"), lambda = cfg.num("lambda");
  const bool full_scale = cfg.flag("full_scale");
  const int rows = static_cast<int>(full_scale ? cfg.integer("full_scale_size") : cfg.integer("rows"));
  const int cols = static_cast<int>(full_scale ? cfg.integer("full_scale_size") : cfg.integer("cols"));

  Matrix clean;
  const std::string& image = cfg.str("image");
  if (image == "synthetic") {
    clean = synthetic_image(rows, cols);
  } else {
    clean = load_pgm(image);
  }
  // y = clean + sigma z
  Matrix y = clean;
  {
    ChainRng rng(static_cast<uint64_t>(cfg.integer("data_seed")), 0);
    for (size_t i = 0; i < y.data.size(); ++i) {
      rng.begin(ChainRng::kData, static_cast<uint64_t>(i));
      y.data[i] += sigma * rng.normal();
    }
  }

  const SplitPotential pot =
      make_tv_image_potential(y, sigma, lambda, cfg.num("prox_tolerance"), 200);
  const GridMRFSpec spec = make_grid_spec(y, sigma, lambda, static_cast<int>(cfg.integer("labels")));
  const MarginalSet reference =
      bp_grid_marginals(spec, cfg.num("bp_damping"), static_cast<int>(cfg.integer("bp_max_sweeps")));
  write_marginal_set(ctx, "bp_marginals.csv", reference);

  run_tv_sites(ctx, pot, InitSpec::dirac(y.data), reference, y.rows * y.cols);
}

}  // namespace

Vec generate_chain_data(uint64_t seed, double sigma, int dim) {
  require(dim >= 1, Error::Code::InvalidArgument, "generate_chain_data: dim >= 1");
  Vec y(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    const int pos = i + 1;  // plateaus specified with 1-based sites
    double v = 0.0;
    if (pos <= 10) v = -3.0;
    else if (pos <= 30) v = -1.0;
    else if (pos <= 35) v = 3.0;
    else if (pos <= 75) v = 2.0;
    y[i] = v;
  }
  if (sigma > 0.0) {
    ChainRng rng(seed, 0);
    for (int i = 0; i < dim; ++i) {
      rng.begin(ChainRng::kData, static_cast<uint64_t>(i));
      y[i] += sigma * rng.normal();
    }
  }
  return y;
}

Matrix synthetic_image(int rows, int cols) {
  require(rows >= 2 && cols >= 2, Error::Code::InvalidArgument, "synthetic_image: too small");
  Matrix img(rows, cols, 0.2);
  for (int i = rows / 8; i < rows / 2; ++i)
    for (int j = cols / 8; j < cols / 2; ++j) img(i, j) = 0.85;
  for (int i = rows / 2; i < 7 * rows / 8; ++i)
    for (int j = cols / 2; j < 7 * cols / 8; ++j) img(i, j) = 0.55;
  for (int i = 2 * rows / 3; i < rows; ++i)
    for (int j = 0; j < cols / 4; ++j) img(i, j) = 0.0;
  return img;
}

Matrix load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Error::Code::Io, "cannot open image '" + path + "'");
  std::string magic;
  in >> magic;
  require(magic == "P2" || magic == "P5", Error::Code::Io, "unsupported graymap '" + path + "'");
  const auto next_token = [&in]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    fail(Error::Code::Io, "truncated graymap header");
  };
  const int cols = std::stoi(next_token());
  const int rows = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  require(cols >= 1 && rows >= 1 && maxval >= 1 && maxval <= 65535, Error::Code::Io,
          "bad graymap header");
  Matrix img(rows, cols);
  if (magic == "P2") {
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = std::stod(next_token()) / maxval;
  } else {
    in.get();  // single whitespace after header
    const int bytes = maxval > 255 ? 2 : 1;
    for (size_t i = 0; i < img.data.size(); ++i) {
      int v = in.get();
      require(v != EOF, Error::Code::Io, "truncated graymap data");
      if (bytes == 2) {
        const int lo = in.get();
        require(lo != EOF, Error::Code::Io, "truncated graymap data");
        v = v * 256 + lo;
      }
      img.data[i] = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  for (const Diagnostic& d : validate_config(cfg))
    if (d.error) fail(Error::Code::Config, "config invalid: " + d.message);

  Context ctx{cfg, std::filesystem::path(cfg.str("output_dir")),
              std::max(1, static_cast<int>(cfg.integer("threads")) == 0
                              ? static_cast<int>(std::thread::hardware_concurrency())
                              : static_cast<int>(cfg.integer("threads")))};
  std::filesystem::create_directories(ctx.out);

  if (cfg.experiment == "moreau-sweep") run_moreau_sweep(ctx);
  else if (cfg.experiment == "laplace-moreau") run_laplace_moreau(ctx);
  else if (cfg.experiment == "gmm") run_gmm(ctx);
  else if (cfg.experiment == "tv-prior") run_tv_prior(ctx);
  else if (cfg.experiment == "tv-chain") run_tv_chain(ctx);
  else if (cfg.experiment == "tv-image") run_tv_image(ctx);
  else fail(Error::Code::Config, "unknown experiment '" + cfg.experiment + "'");

  return std::move(ctx.result);
}

}  // namespace daz
