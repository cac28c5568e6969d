#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "trawl/kernels.hpp"
#include "trawl/rng.hpp"

using namespace trawl;
namespace K = trawl::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * std::max(scale, 1e-300); }

}  // namespace

TEST_CASE("vectorized kernels match the scalar reference", "[kernels]") {
  if (!K::isa_available(K::Isa::Avx2)) SKIP("AVX2 not available");
  Rng rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 1000u, 4099u}) {
    const auto x = random_vec(rng, n, -3.0, 5.0);
    const auto y = random_vec(rng, n, 0.0, 2.0);
    double abs_sum = 0.0;
    for (double v : x) abs_sum += std::abs(v);
    CHECK(close(K::avx2::sum(x.data(), n), K::scalar::sum(x.data(), n), abs_sum));

    double abs_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_dot += std::abs((x[i] - 0.3) * (y[i] - 1.1));
    CHECK(close(K::avx2::centered_dot(x.data(), 0.3, y.data(), 1.1, n),
                K::scalar::centered_dot(x.data(), 0.3, y.data(), 1.1, n), abs_dot));

    auto ya = y, ys = y;
    K::avx2::axpy(-0.7, x.data(), ya.data(), n);
    K::scalar::axpy(-0.7, x.data(), ys.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(ya[i], ys[i], std::abs(ys[i]) + 0.7 * std::abs(x[i])));

    for (int m = 0; m <= 4; ++m) {
      const auto c = random_vec(rng, m + 1, -1.0, 1.0);
      std::vector<double> pa(n), da(n), ps(n), ds(n);
      K::avx2::taylor_eval(c.data(), m, 0.9, x.data(), n, pa.data(), da.data());
      K::scalar::taylor_eval(c.data(), m, 0.9, x.data(), n, ps.data(), ds.data());
      for (std::size_t i = 0; i < n; ++i) {
        double scale = 0.0, dscale = 0.0;
        const double t = std::abs(x[i] - 0.9);
        for (int l = 1; l <= m; ++l) {
          scale += std::abs(c[l]) * std::pow(t, l);
          dscale += l * std::abs(c[l]) * std::pow(t, l - 1);
        }
        CHECK(close(pa[i], ps[i], scale));
        CHECK(close(da[i], ds[i], dscale));
      }
    }
  }
}

TEST_CASE("taylor_eval evaluates the shifted polynomial", "[kernels]") {
  const double c[4] = {99.0, 1.0, -2.0, 0.5};
  const double x[3] = {1.0, 2.0, -0.5};
  double p[3], d[3];
  K::taylor_eval(c, 3, 1.0, x, 3, p, d);
  for (int i = 0; i < 3; ++i) {
    const double t = x[i] - 1.0;
    CHECK(p[i] == Catch::Approx(t - 2 * t * t + 0.5 * t * t * t).epsilon(1e-15));
    CHECK(d[i] == Catch::Approx(1 - 4 * t + 1.5 * t * t).epsilon(1e-15));
  }
  K::taylor_eval(c, 0, 1.0, x, 3, p, nullptr);
  for (double v : p) CHECK(v == 0.0);
}

TEST_CASE("ISA selection", "[kernels]") {
  const K::Isa before = K::active_isa();
  CHECK(K::isa_available(K::Isa::Scalar));
  CHECK(K::set_isa(K::Isa::Scalar));
  CHECK(K::active_isa() == K::Isa::Scalar);
  const double x[5] = {1, 2, 3, 4, 5};
  CHECK(K::sum(x, 5) == 15.0);
  if (!K::isa_available(K::Isa::Neon)) CHECK_FALSE(K::set_isa(K::Isa::Neon));
  K::set_isa(before);
  CHECK(K::active_isa() == before);
}
