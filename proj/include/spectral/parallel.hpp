#pragma once

#include <cstdint>
#include <functional>
#include <optional>

namespace spectral {

// Worker-count resolution order: explicit request, SPECTRAL_REG_WORKERS
// environment variable, then the OpenMP default for this machine.
int resolve_workers(std::optional<int> requested = std::nullopt);

// Runs fn(i) for i in [0, count) on `workers` threads. Callers must make the
// work order-independent (disjoint output slots, integer accumulators);
// deterministic results are then independent of scheduling. An exception
// thrown by any fn is captured and rethrown after the loop completes.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace spectral
