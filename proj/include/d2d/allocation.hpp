#pragma once

#include <string>
#include <vector>

namespace d2d {

class Scenario;

/// Communication mode of a link on its RB: q = 0 cellular (to the serving
/// BS), q = 1 direct D2D.
enum class Mode { Cellular = 0, Direct = 1 };

enum class ModePolicy { ForcedCellular, ForcedD2D, Adaptive };

const char* to_string(Mode m);
const char* to_string(ModePolicy p);

struct LinkAssignment {
    int rb = -1;              ///< -1 when the link is not scheduled
    Mode mode = Mode::Cellular;
    bool dedicated = true;    ///< false when the link reuses an occupied RB

    bool operator==(const LinkAssignment&) const = default;
};

/// Assignment x_{l,j}(q) of every link to at most one RB and one mode, plus
/// the per-cell reuse counters rho_j.
struct Allocation {
    std::vector<LinkAssignment> links;
    std::vector<std::vector<int>> reuse; ///< reuse[cell][rb]
    ModePolicy policy = ModePolicy::Adaptive;

    Allocation() = default;
    Allocation(std::size_t num_links, int num_cells, int num_rbs)
        : links(num_links), reuse(static_cast<std::size_t>(num_cells), std::vector<int>(static_cast<std::size_t>(num_rbs), 0))
    {
    }

    bool operator==(const Allocation&) const = default;
};

/// Checks C1-C4 and the reuse-counter bookkeeping. Returns one message per
/// violation; an empty vector means the allocation is valid.
std::vector<std::string> check_constraints(const Scenario& scenario, const Allocation& allocation);

} // namespace d2d
