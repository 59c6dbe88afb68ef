#include "sgpart/baselines.hpp"

#include <cassert>

namespace sgp {

std::vector<Machine> lwd_run(const IncidenceStream& stream, std::size_t k,
                             std::size_t capacity) {
  const std::size_t n = stream.size();
  PartitionState state(n, k, capacity);
  std::vector<std::size_t> neighbors_on(k, 0);
  for (const IncidenceEvent& ev : stream) {
    std::fill(neighbors_on.begin(), neighbors_on.end(), 0);
    for (Vertex u : ev.back_neighbors) {
      const Machine m = state.machine_of(u);
      if (m != kUnassigned) ++neighbors_on[m];
    }
    Machine best = kUnassigned;
    double best_score = 0.0;
    for (Machine m = 0; m < k; ++m) {
      if (!state.has_room(m)) continue;
      const double load = static_cast<double>(state.sizes()[m]) /
                          static_cast<double>(capacity);
      const double score = static_cast<double>(neighbors_on[m]) * (1.0 - load);
      if (best == kUnassigned || score > best_score) {
        best = m;
        best_score = score;
      }
    }
    // The constructor guarantees capacity * k >= n, so a machine has room.
    assert(best != kUnassigned);
    state.place(ev.vertex, best);
  }
  return {state.assignment().begin(), state.assignment().end()};
}

std::vector<Machine> hash_run(const IncidenceStream& stream, std::size_t k) {
  if (k == 0) throw ConfigError("k must be positive");
  std::vector<Machine> assignment(stream.size(), kUnassigned);
  for (const IncidenceEvent& ev : stream)
    assignment.at(ev.vertex) = static_cast<Machine>(ev.vertex % k);
  return assignment;
}

}  // namespace sgp
