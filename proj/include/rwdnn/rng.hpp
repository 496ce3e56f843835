#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rwdnn {

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; only used to turn stream labels into integers.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t mix_component(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ splitmix64(v));
}
constexpr std::uint64_t mix_component(std::uint64_t h, std::string_view v) noexcept {
  return splitmix64(h ^ fnv1a(v));
}

}  // namespace detail

/// Derives an independent 64-bit seed from a master seed and a path of
/// labels or indices, e.g. `derive_seed(master, "dgp1", "t2", n, rep)`.
/// Distinct paths give statistically unrelated streams; the mapping is
/// stable across platforms.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, const Parts&... parts) noexcept {
  std::uint64_t h = detail::splitmix64(master);
  ((h = detail::mix_component(h, parts)), ...);
  return h;
}

}  // namespace rwdnn
