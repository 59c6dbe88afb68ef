#include "sgpart/partition.hpp"

#include <cmath>
#include <string>

namespace sgp {

std::size_t capacity_for(std::size_t n, std::size_t k, double nu) {
  if (k == 0) throw ConfigError("k must be positive");
  if (!(nu >= 1.0)) throw ConfigError("imbalance tolerance must be >= 1");
  // Exact for nu == 1; the epsilon absorbs representation error otherwise.
  if (nu == 1.0) return (n + k - 1) / k;
  const double raw = nu * static_cast<double>(n) / static_cast<double>(k);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

PartitionState::PartitionState(std::size_t n, std::size_t k,
                               std::size_t capacity)
    : capacity_(capacity),
      assignment_(n, kUnassigned),
      held_flag_(n, 0),
      sizes_(k, 0),
      held_(k, 0) {
  if (k == 0) throw ConfigError("need at least one machine");
  if (capacity * k < n)
    throw ConfigError("capacity " + std::to_string(capacity) +
                      " cannot hold " + std::to_string(n) + " vertices on " +
                      std::to_string(k) + " machines");
}

void PartitionState::check_vertex(Vertex v) const {
  if (v >= assignment_.size())
    throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
}

void PartitionState::check_machine(Machine machine) const {
  if (machine >= sizes_.size())
    throw std::out_of_range("machine " + std::to_string(machine) +
                            " out of range");
}

bool PartitionState::try_place(Vertex v, Machine machine) {
  check_vertex(v);
  check_machine(machine);
  if (assignment_[v] != kUnassigned)
    throw std::logic_error("vertex " + std::to_string(v) +
                           " is already placed");
  if (sizes_[machine] >= capacity_) return false;
  assignment_[v] = machine;
  ++sizes_[machine];
  ++committed_;
  return true;
}

void PartitionState::place(Vertex v, Machine machine) {
  if (!try_place(v, machine))
    throw CapacityError("machine " + std::to_string(machine) +
                        " is at capacity " + std::to_string(capacity_));
}

void PartitionState::hold(Vertex v, Machine machine) {
  check_vertex(v);
  check_machine(machine);
  if (assignment_[v] != kUnassigned)
    throw std::logic_error("vertex " + std::to_string(v) +
                           " is already placed");
  assignment_[v] = machine;
  held_flag_[v] = 1;
  ++held_[machine];
}

void PartitionState::release(Vertex v) {
  check_vertex(v);
  if (!held_flag_[v])
    throw std::logic_error("vertex " + std::to_string(v) +
                           " is not provisionally held");
  --held_[assignment_[v]];
  assignment_[v] = kUnassigned;
  held_flag_[v] = 0;
}

std::optional<Machine> PartitionState::least_loaded_with_room() const {
  std::optional<Machine> best;
  for (Machine m = 0; m < sizes_.size(); ++m) {
    if (sizes_[m] >= capacity_) continue;
    if (!best || sizes_[m] < sizes_[*best]) best = m;
  }
  return best;
}

}  // namespace sgp
