#pragma once

#include <cstdint>
#include <initializer_list>

namespace densray {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of stream tags, e.g.
/// derive_seed(global, {kAnalogyStream, category, fold}). Every random draw in
/// the toolkit is seeded through this function so that serial and parallel
/// runs agree.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t tag : path) s = mix64(s ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags.
inline constexpr std::uint64_t kCompletionStream = 1;
inline constexpr std::uint64_t kTrainerStream = 2;
inline constexpr std::uint64_t kSubsampleStream = 3;
inline constexpr std::uint64_t kAnalogyStream = 4;

}  // namespace densray
