#pragma once

#include <string>
#include <vector>

#include "common.hpp"
#include "config.hpp"

namespace daz {

inline constexpr const char* kVersion = "0.1.0";

struct RunResult {
  std::vector<std::string> files;
};

/// Executes the configured experiment and writes its CSV artifacts (each with
/// a `.meta` sidecar echoing the resolved config). Deterministic for a fixed
/// config: identical bytes for any thread count.
RunResult run_experiment(const ExperimentConfig& config);

/// Piecewise-constant chain data of the denoising experiment plus Gaussian
/// noise of scale sigma; sigma = 0 returns the clean plateaus.
Vec generate_chain_data(uint64_t seed, double sigma = 0.1, int dim = 100);

/// Built-in piecewise-constant test image with values in [0, 1].
Matrix synthetic_image(int rows, int cols);

/// Minimal portable graymap reader (P2/P5), scaled to [0, 1].
Matrix load_pgm(const std::string& path);

}  // namespace daz
