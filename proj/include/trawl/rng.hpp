#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace trawl {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of a named stream: hash of (root, module, task, index).
std::uint64_t stream_seed(std::uint64_t root, std::string_view module, std::string_view task,
                          std::uint64_t index = 0);

// Seed derived from a root and a list of integer ids.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> ids);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }
  std::mt19937_64& engine() { return eng_; }
  // Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
  // Standard normal by inversion.
  double normal();

 private:
  std::mt19937_64 eng_;
};

}  // namespace trawl
