#include "carefree/rng.hpp"

namespace carefree {

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream_index) noexcept {
  std::uint64_t z = base_seed + (stream_index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t base_seed, std::uint64_t stream_index) {
  return Rng{derive_seed(base_seed, stream_index)};
}

}  // namespace carefree
