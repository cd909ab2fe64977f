#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ergotac
{
using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent stream seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a tag, so named streams ("sensor", "planner", ...) stay stable across builds.
constexpr std::uint64_t tag_hash(std::string_view tag)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag)
  {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0)
{
  return mix_seed(mix_seed(master ^ tag_hash(tag)) + index);
}

}  // namespace ergotac
