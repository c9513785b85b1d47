// Command-line driver for the daz shared library. Talks to the library
// exclusively through the C interface in daz/daz.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "daz/daz.h"

namespace {

int status_to_exit(daz_status st) {
  switch (st) {
    case DAZ_OK:
      return 0;
    case DAZ_ERR_CONFIG:
    case DAZ_ERR_INVALID_ARGUMENT:
    case DAZ_ERR_IO:
      return 1;
    default:
      return 2;
  }
}

std::string build_overrides(const std::vector<std::string>& samplers, long long seed,
                            long long chains, const std::string& out_dir, long long threads,
                            bool full_scale) {
  std::string o;
  if (!samplers.empty()) {
    o += "samplers = ";
    for (size_t i = 0; i < samplers.size(); ++i) {
      if (i) o += ",";
      o += samplers[i];
    }
    o += "\n";
  }
  if (seed >= 0) o += "base_seed = " + std::to_string(seed) + "\n";
  if (chains > 0) o += "n_chains = " + std::to_string(chains) + "\n";
  if (!out_dir.empty()) o += "output_dir = " + out_dir + "\n";
  if (threads > 0) o += "threads = " + std::to_string(threads) + "\n";
  if (full_scale) o += "full_scale = true\n";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"daz - annealed Moreau-envelope Langevin sampling experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(daz_version()));

  std::string config;
  std::vector<std::string> samplers;
  long long seed = -1, chains = 0, threads = 0;
  std::string out_dir;
  bool full_scale = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment config and write CSV artifacts");
  run->add_option("config", config, "experiment config file")->required();
  run->add_option("--sampler", samplers, "restrict to these samplers (repeatable)");
  run->add_option("--seed", seed, "override base_seed");
  run->add_option("--chains", chains, "override n_chains");
  run->add_option("--out", out_dir, "override output_dir");
  run->add_option("--threads", threads, "worker threads (default: hardware)");
  run->add_flag("--full-scale", full_scale, "use the full-size experiment variant");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config, "experiment config file")->required();

  CLI::App* list = app.add_subcommand("list-experiments", "print the supported experiments");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    char names[512];
    const daz_status st = daz_experiment_list(names, sizeof(names));
    if (st != DAZ_OK) {
      std::fprintf(stderr, "error: %s\n", daz_last_error());
      return status_to_exit(st);
    }
    std::string all = names;
    size_t pos = 0;
    while (pos < all.size()) {
      size_t comma = all.find(',', pos);
      if (comma == std::string::npos) comma = all.size();
      std::printf("%s\n", all.substr(pos, comma - pos).c_str());
      pos = comma + 1;
    }
    return 0;
  }

  const std::string overrides =
      build_overrides(samplers, seed, chains, out_dir, threads, full_scale);

  if (validate->parsed()) {
    char diag[8192];
    int32_t n_errors = 0;
    const daz_status st =
        daz_experiment_validate(config.c_str(), overrides.c_str(), diag, sizeof(diag), &n_errors);
    if (st != DAZ_OK) {
      std::fprintf(stderr, "error: %s\n", daz_last_error());
      return status_to_exit(st);
    }
    if (diag[0] != '\0') std::fputs(diag, stdout);
    if (n_errors > 0) {
      std::fprintf(stderr, "%d error(s)\n", n_errors);
      return 1;
    }
    std::printf("ok\n");
    return 0;
  }

  const daz_status st = daz_experiment_run(config.c_str(), overrides.c_str());
  if (st != DAZ_OK) {
    std::fprintf(stderr, "error: %s\n", daz_last_error());
    return status_to_exit(st);
  }
  return 0;
}
