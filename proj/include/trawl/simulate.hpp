#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trawl/model.hpp"

namespace trawl {

struct SimOptions {
  int threads = 1;
  // Upper bound on the age of a slice in grid steps; 0 means n.
  std::size_t max_age = 0;
  // Slices older than the first age M with rho(M tau) < tail are merged into
  // the slice of age M-1. The marginal area lost is at most Leb(A) rho(M tau).
  double tail = 1e-8;
};

// Age at which the slice partition is cut.
std::size_t simulation_max_age(const TrawlFunction& tf, std::size_t n, double tau, const SimOptions& opts = {});

// Path X_tau, ..., X_{n tau}. Column b of the slice partition draws from its own
// stream derive_seed(seed, {b}), so the output does not depend on opts.threads.
std::vector<double> simulate(const ModelSpec& model, std::size_t n, double tau, std::uint64_t seed,
                             const SimOptions& opts = {});

}  // namespace trawl
