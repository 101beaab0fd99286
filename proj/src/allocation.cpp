#include "d2d/allocation.hpp"

#include "d2d/topology.hpp"

namespace d2d {

const char* to_string(Mode m) { return m == Mode::Cellular ? "cellular" : "direct"; }

const char* to_string(ModePolicy p)
{
    switch (p) {
    case ModePolicy::ForcedCellular: return "ForcedCellular";
    case ModePolicy::ForcedD2D: return "ForcedD2D";
    case ModePolicy::Adaptive: return "Adaptive";
    }
    return "?";
}

std::vector<std::string> check_constraints(const Scenario& scenario, const Allocation& allocation)
{
    std::vector<std::string> errs;
    const auto cells = static_cast<std::size_t>(scenario.num_cells());
    const auto rbs = static_cast<std::size_t>(scenario.num_rbs());
    if (allocation.links.size() != scenario.num_links()) {
        errs.push_back("allocation size differs from link count");
        return errs;
    }
    if (allocation.reuse.size() != cells) {
        errs.push_back("reuse counters missing for some cells");
        return errs;
    }

    std::vector<std::vector<int>> cellular_on(cells, std::vector<int>(rbs, 0));
    std::vector<std::vector<int>> count_on(cells, std::vector<int>(rbs, 0));
    for (std::size_t l = 0; l < scenario.num_links(); ++l) {
        const auto& a = allocation.links[l];
        const auto& lk = scenario.link(l);
        if (a.rb < 0)
            continue;
        // C4: x binary, i.e. a valid RB index and a valid mode.
        if (a.rb >= scenario.num_rbs()) {
            errs.push_back("C4: link " + std::to_string(l) + " has RB index out of range");
            continue;
        }
        if (a.mode != Mode::Cellular && a.mode != Mode::Direct)
            errs.push_back("C2: link " + std::to_string(l) + " has an invalid mode");
        // C3
        if (!lk.is_d2d() && a.mode == Mode::Direct)
            errs.push_back("C3: cellular UE " + std::to_string(l) + " in direct mode");
        const auto c = static_cast<std::size_t>(lk.cell);
        const auto j = static_cast<std::size_t>(a.rb);
        ++count_on[c][j];
        if (a.mode == Mode::Cellular)
            ++cellular_on[c][j];
    }
    for (std::size_t c = 0; c < cells; ++c) {
        if (allocation.reuse[c].size() != rbs) {
            errs.push_back("reuse counters of cell " + std::to_string(c) + " have wrong length");
            continue;
        }
        for (std::size_t j = 0; j < rbs; ++j) {
            if (cellular_on[c][j] > 1)
                errs.push_back("C1: cell " + std::to_string(c) + " RB " + std::to_string(j) + " has "
                               + std::to_string(cellular_on[c][j]) + " cellular-mode transmitters");
            if (allocation.reuse[c][j] != count_on[c][j])
                errs.push_back("rho: cell " + std::to_string(c) + " RB " + std::to_string(j) + " counter "
                               + std::to_string(allocation.reuse[c][j]) + " != " + std::to_string(count_on[c][j]));
        }
    }
    return errs;
}

} // namespace d2d
