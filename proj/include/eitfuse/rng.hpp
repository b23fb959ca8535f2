#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace eitfuse {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent stream seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Runs fn(i) for i in [0, n) on up to `threads` worker threads (0 = hardware
/// concurrency). fn must not touch shared mutable state. The first exception
/// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace eitfuse
