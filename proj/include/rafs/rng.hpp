#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rafs {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for the independent stream identified by (seed, index, tag). Streams
// with different tags or indices never share state, so e.g. a member's anchor
// draws do not depend on how many bootstrap draws another member made.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                    std::string_view tag) {
  return mix64(mix64(mix64(seed) ^ index) ^ hash_tag(tag));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index, std::string_view tag) {
  return Rng(stream_seed(seed, index, tag));
}

}  // namespace rafs
