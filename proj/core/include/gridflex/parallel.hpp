#pragma once

#include <cstdint>
#include <functional>

namespace gridflex {

/// Runs `task(i)` for i in [0, count) on up to `threads` workers. Tasks must
/// write only to their own output slot; completion order is unspecified.
/// The first exception thrown by a task is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& task);

/// Counter-based generator: the n-th draw of a stream depends only on
/// (seed, stream, n), so results do not depend on scheduling or platform.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  CounterRng split(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace gridflex
