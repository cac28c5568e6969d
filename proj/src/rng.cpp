#include "trawl/rng.hpp"

#include "trawl/special.hpp"

namespace trawl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

std::uint64_t stream_seed(std::uint64_t root, std::string_view module, std::string_view task,
                          std::uint64_t index) {
  std::uint64_t h = fnv1a(module, 0xcbf29ce484222325ULL);
  h = fnv1a("/", h);
  h = fnv1a(task, h);
  return mix64(mix64(root) ^ mix64(h) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t id : ids) h = mix64(h ^ mix64(id + 0x2545f4914f6cdd1dULL));
  return h;
}

double Rng::normal() { return normal_quantile(uniform()); }

}  // namespace trawl
