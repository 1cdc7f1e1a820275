#pragma once

#include <cstdint>
#include <random>

namespace carefree {

using Rng = std::mt19937_64;

/// Seed used by every driver when the caller does not pass one.
inline constexpr std::uint64_t kDefaultSeed = 20250611;

/// Mixes (base, stream) into a 64-bit seed with the splitmix64 finalizer, so
/// neighbouring stream indices get unrelated generator states.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream_index) noexcept;

/// Independent generator for one task (a replication, a block, ...).
Rng make_stream(std::uint64_t base_seed, std::uint64_t stream_index);

}  // namespace carefree
