#pragma once

#include "d2d/allocation.hpp"
#include "d2d/topology.hpp"

#include <cstdint>

namespace d2d::ra {

enum class Scheme { MinInterf, BRA, CPA };

const char* to_string(Scheme s);

/// Gives the cellular UEs of `cell` distinct RBs in UE index order (UE i gets
/// RB i) and sets their reuse counters to 1. Throws ConfigError when the cell
/// has more UEs than RBs.
void allocate_cellular_legacy(const Scenario& scenario, int cell, Allocation& allocation);

/// Direct mode iff the cellular-mode gain does not exceed the D2D gain.
Mode mode_select_dedicated(double g_cellular, double g_d2d);

/// Interference measure S(j) in dB for placing D2D candidate `candidate` on
/// RB `rb` next to the intracell links already there. Multiple incumbents are
/// aggregated in the linear domain before conversion to dB. Returns -inf for
/// an empty RB.
double reuse_interference_db(const Scenario& scenario, const Allocation& allocation, int candidate, int rb);

/// Full-knowledge heuristic: dedicated RBs first, then the RB minimizing S(j).
Allocation min_interf(const Scenario& scenario, ModePolicy policy = ModePolicy::Adaptive);

/// Balanced random allocation: reuse picks uniformly among least-loaded RBs.
Allocation bra(const Scenario& scenario, std::uint64_t seed, ModePolicy policy = ModePolicy::Adaptive);

/// Cellular protection allocation: reuse picks, among least-loaded RBs, the
/// one whose cellular-mode incumbent has the strongest gain to the BS.
Allocation cpa(const Scenario& scenario, ModePolicy policy = ModePolicy::Adaptive);

/// Dispatches to one of the algorithms above and then enforces the policy.
Allocation allocate(const Scenario& scenario, Scheme scheme, ModePolicy policy, std::uint64_t seed);

/// Enforces a mode policy on an existing allocation. ForcedCellular throws
/// InfeasibleError when a cell holds more links than RBs or when the
/// allocation reuses an RB.
Allocation apply_mode_policy(const Scenario& scenario, Allocation allocation, ModePolicy policy);

} // namespace d2d::ra
