#include "trawl/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "trawl/error.hpp"
#include "trawl/parallel.hpp"
#include "trawl/rng.hpp"

namespace trawl {

namespace {

constexpr std::size_t kBlock = 64;

double draw_piece(const SeedDistribution& seed, double area, Rng& rng) {
  if (area < -1e-12) throw ConsistencyError("simulate: negative slice area");
  if (area <= 0.0) return 0.0;
  return sample(basis_scale(seed, area), rng);
}

}  // namespace

std::size_t simulation_max_age(const TrawlFunction& tf, std::size_t n, double tau, const SimOptions& opts) {
  std::size_t cap = n;
  if (opts.max_age > 0) cap = std::min(cap, opts.max_age);
  for (std::size_t k = 1; k < cap; ++k)
    if (acf(tf, k * tau) < opts.tail) return k;
  return std::max<std::size_t>(cap, 1);
}

std::vector<double> simulate(const ModelSpec& model, std::size_t n, double tau, std::uint64_t seed,
                             const SimOptions& opts) {
  if (n < 1) throw DomainError("simulate: n must be >= 1");
  if (!(tau > 0.0)) throw DomainError("simulate: spacing must be positive");
  if (!is_basis_family(model.seed.family()))
    throw UnsupportedError("simulate: seed family " + family_name(model.seed.family()) +
                           " does not define a Levy basis");
  const double leb = model.area();
  const std::size_t M = simulation_max_age(model.trawl, n, tau, opts);
  std::vector<double> rho(M + 2);
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = acf(model.trawl, k * tau);
  std::vector<double> g(M + 1);
  for (std::size_t k = 0; k <= M; ++k) g[k] = rho[k] - rho[k + 1];

  // diff[j] (0-based time index) receives +W at the first covered time and
  // -W one past the last; the path is its prefix sum.
  std::vector<double> diff(n + 1, 0.0);

  {
    Rng rng(derive_seed(seed, {1}));
    const std::size_t D = std::min(M, n);
    for (std::size_t d = 1; d <= D; ++d) {
      const double a = d < D ? leb * (rho[d - 1] - rho[d]) : leb * rho[D - 1];
      const double w = draw_piece(model.seed, a, rng);
      diff[0] += w;
      diff[d] -= w;
    }
  }

  const std::size_t ncols = n - 1;  // columns b = 2..n
  const std::size_t nblocks = (ncols + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> local(nblocks);
  parallel_for(nblocks, opts.threads, [&](std::size_t blk) {
    const std::size_t b0 = 2 + blk * kBlock;
    const std::size_t b1 = std::min(n, b0 + kBlock - 1);
    auto& loc = local[blk];
    loc.assign(kBlock + M + 1, 0.0);
    for (std::size_t b = b0; b <= b1; ++b) {
      Rng rng(derive_seed(seed, {b}));
      const std::size_t K = std::min(M - 1, n - b);
      double col = 0.0;
      for (std::size_t k = 0; k <= K; ++k) {
        const double a = k < K ? leb * (g[k] - g[k + 1]) : leb * g[K];
        const double w = draw_piece(model.seed, a, rng);
        col += w;
        // covers times b..b+k (1-based), i.e. diff index b-1 .. b+k-1
        loc[b + k - b0 + 1] -= w;
      }
      loc[b - b0] += col;
    }
  });
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    const std::size_t off = 1 + blk * kBlock;  // diff index of b0 - 1
    const auto& loc = local[blk];
    for (std::size_t i = 0; i < loc.size() && off + i <= n; ++i) diff[off + i] += loc[i];
  }

  std::vector<double> x(n);
  double s = 0.0, c = 0.0;
  const Family fam = model.seed.family();
  const bool nonneg = is_positive_support(fam) || fam == Family::Poisson || fam == Family::NegBinomial;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = diff[j];
    const double t = s + v;
    c += std::fabs(s) >= std::fabs(v) ? (s - t) + v : (v - t) + s;
    s = t;
    x[j] = s + c;
    if (nonneg) x[j] = std::max(x[j], 0.0);
  }
  return x;
}

}  // namespace trawl
