#include "rlfs/rng.hpp"

namespace rlfs {
namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
  return SplitMix(SplitMix(root) ^ Fnv1a(name));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index) {
  return SplitMix(derive_seed(root, name) ^ SplitMix(index + 0x632be59bd9b4e019ULL));
}

}  // namespace rlfs
