#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgpart/planted.hpp"

namespace sgp {

using Machine = std::uint32_t;
inline constexpr Machine kUnassigned = std::numeric_limits<Machine>::max();

/// Thrown when a committed placement would push a machine past capacity.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-machine capacity ceil(nu * n / k).
std::size_t capacity_for(std::size_t n, std::size_t k, double nu = 1.0);

/// Vertex-to-machine assignment built during a single pass.
///
/// Vertices are either committed (counted against capacity, never moved) or
/// held provisionally. Held vertices sit on a machine without consuming its
/// capacity and may later be released and committed elsewhere. Membership
/// queries are O(1) through the assignment array.
class PartitionState {
 public:
  PartitionState(std::size_t n, std::size_t k, std::size_t capacity);

  std::size_t n() const { return assignment_.size(); }
  std::size_t k() const { return sizes_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// Commits v to machine. Throws CapacityError when the machine is full and
  /// std::logic_error when v is already placed.
  void place(Vertex v, Machine machine);
  /// As place(), but reports a full machine by returning false.
  bool try_place(Vertex v, Machine machine);

  /// Puts v on machine provisionally.
  void hold(Vertex v, Machine machine);
  /// Removes a provisional placement; v becomes unassigned.
  void release(Vertex v);

  bool is_held(Vertex v) const { return held_flag_.at(v) != 0; }
  bool is_assigned(Vertex v) const { return assignment_.at(v) != kUnassigned; }
  bool contains(Machine machine, Vertex v) const {
    return assignment_.at(v) == machine;
  }
  Machine machine_of(Vertex v) const { return assignment_.at(v); }
  bool has_room(Machine machine) const {
    return sizes_.at(machine) < capacity_;
  }

  /// Committed vertex count per machine.
  std::span<const std::size_t> sizes() const { return sizes_; }
  /// Provisional vertex count per machine.
  std::span<const std::size_t> held() const { return held_; }
  std::span<const Machine> assignment() const { return assignment_; }

  std::size_t committed_count() const { return committed_; }
  bool complete() const { return committed_ == n(); }

  /// Least-loaded machine with room, lowest index on ties.
  std::optional<Machine> least_loaded_with_room() const;

 private:
  void check_vertex(Vertex v) const;
  void check_machine(Machine machine) const;

  std::size_t capacity_;
  std::vector<Machine> assignment_;
  std::vector<char> held_flag_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> held_;
  std::size_t committed_ = 0;
};

}  // namespace sgp
