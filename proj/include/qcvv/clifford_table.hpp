#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/qubit_algebra.hpp"

namespace qcvv {

/// Version tag of the built-in decomposition table.
inline constexpr const char* kCliffordTableVersion = "clifford-table-v1";

/// Built-in decompositions. Every non-identity Clifford is at most one driven
/// pulse about x or y (+-pi/2 or pi) followed by at most one frame-z update;
/// the identity is an idle of `identity_idle` pi/2 units.
std::vector<std::vector<PhysicalPulse>> builtin_clifford_table(int identity_idle = 2);

/// Serialised form: {"version": ..., "elements": [{index, pulses: [{axis,
/// angle_units_of_pi_over_2, duration}]}]}.
nlohmann::json clifford_table_to_json(const CliffordGroup& group);
/// Accepts the object form above or a bare array of elements.
CliffordGroup clifford_group_from_json(const nlohmann::json& j);

}  // namespace qcvv
