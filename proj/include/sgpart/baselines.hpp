#pragma once

#include <cstddef>
#include <vector>

#include "sgpart/partition.hpp"
#include "sgpart/planted.hpp"

namespace sgp {

/// Linear weighted deterministic greedy. Each arrival goes to the machine
/// maximizing |N(v) on machine| * (1 - size / capacity) among machines with
/// room, lowest index on ties. Requires capacity * k >= n.
std::vector<Machine> lwd_run(const IncidenceStream& stream, std::size_t k,
                             std::size_t capacity);

/// Vertex v goes to machine v mod k.
std::vector<Machine> hash_run(const IncidenceStream& stream, std::size_t k);

}  // namespace sgp
