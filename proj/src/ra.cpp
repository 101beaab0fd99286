#include "d2d/ra.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>

namespace d2d::ra {

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::MinInterf: return "MinInterf";
    case Scheme::BRA: return "BRA";
    case Scheme::CPA: return "CPA";
    }
    return "?";
}

void allocate_cellular_legacy(const Scenario& scenario, int cell, Allocation& allocation)
{
    int next_rb = 0;
    for (int l : scenario.links_in_cell(cell)) {
        if (scenario.link(static_cast<std::size_t>(l)).is_d2d())
            continue;
        if (next_rb >= scenario.num_rbs())
            throw ConfigError("geometry.ues_per_cell", "more cellular UEs than RBs in cell " + std::to_string(cell));
        auto& a = allocation.links[static_cast<std::size_t>(l)];
        a.rb = next_rb;
        a.mode = Mode::Cellular;
        a.dedicated = true;
        allocation.reuse[static_cast<std::size_t>(cell)][static_cast<std::size_t>(next_rb)] = 1;
        ++next_rb;
    }
}

Mode mode_select_dedicated(double g_cellular, double g_d2d) { return g_cellular <= g_d2d ? Mode::Direct : Mode::Cellular; }

double reuse_interference_db(const Scenario& scenario, const Allocation& allocation, int candidate, int rb)
{
    const auto cand = static_cast<std::size_t>(candidate);
    const Link& lk = scenario.link(cand);
    const std::size_t cand_rx = scenario.receiver_of(cand, Mode::Direct);
    double caused = 0.0;   // candidate Tx -> incumbent receivers
    double suffered = 0.0; // incumbent transmitters -> candidate Rx
    for (int i : scenario.links_in_cell(lk.cell)) {
        const auto inc = static_cast<std::size_t>(i);
        if (inc == cand || allocation.links[inc].rb != rb)
            continue;
        caused += scenario.gain(cand, scenario.receiver_of(inc, allocation.links[inc].mode));
        suffered += scenario.gain(inc, cand_rx);
    }
    if (caused == 0.0)
        return -std::numeric_limits<double>::infinity();
    return linear_to_db(caused) + linear_to_db(suffered);
}

namespace {

Mode dedicated_mode(const Scenario& sc, std::size_t l, ModePolicy policy)
{
    switch (policy) {
    case ModePolicy::ForcedCellular: return Mode::Cellular;
    case ModePolicy::ForcedD2D: return Mode::Direct;
    case ModePolicy::Adaptive: break;
    }
    return mode_select_dedicated(sc.gain_to_serving_bs(l), sc.gain_d2d(l));
}

void check_orthogonality_possible(const Scenario& sc, ModePolicy policy)
{
    if (policy != ModePolicy::ForcedCellular)
        return;
    for (int c = 0; c < sc.num_cells(); ++c)
        if (static_cast<int>(sc.links_in_cell(c).size()) > sc.num_rbs())
            throw InfeasibleError("forced cellular mode needs every link of cell " + std::to_string(c)
                                  + " on its own RB, but the cell has more links than RBs");
}

/// Shared skeleton of all three algorithms. `pick_reuse` chooses the RB for
/// a candidate once no free RB is left in its cell.
template <class PickReuse>
Allocation run_allocation(const Scenario& sc, ModePolicy policy, PickReuse&& pick_reuse)
{
    check_orthogonality_possible(sc, policy);
    Allocation alloc(sc.num_links(), sc.num_cells(), sc.num_rbs());
    alloc.policy = policy;
    for (int c = 0; c < sc.num_cells(); ++c) {
        allocate_cellular_legacy(sc, c, alloc);
        auto& rho = alloc.reuse[static_cast<std::size_t>(c)];
        for (int l : sc.links_in_cell(c)) {
            const auto li = static_cast<std::size_t>(l);
            if (!sc.link(li).is_d2d())
                continue;
            auto& a = alloc.links[li];
            const auto free_rb = std::find(rho.begin(), rho.end(), 0);
            if (free_rb != rho.end()) {
                a.rb = static_cast<int>(free_rb - rho.begin());
                a.mode = dedicated_mode(sc, li, policy);
                a.dedicated = true;
            } else {
                a.rb = pick_reuse(alloc, c, l);
                a.mode = Mode::Direct;
                a.dedicated = false;
            }
            ++rho[static_cast<std::size_t>(a.rb)];
        }
    }
    return alloc;
}

std::vector<int> least_loaded(const std::vector<int>& rho)
{
    const int lo = *std::min_element(rho.begin(), rho.end());
    std::vector<int> out;
    for (std::size_t j = 0; j < rho.size(); ++j)
        if (rho[j] == lo)
            out.push_back(static_cast<int>(j));
    return out;
}

} // namespace

Allocation min_interf(const Scenario& scenario, ModePolicy policy)
{
    return run_allocation(scenario, policy, [&](const Allocation& alloc, int /*cell*/, int cand) {
        int best = 0;
        double best_s = std::numeric_limits<double>::infinity();
        for (int j = 0; j < scenario.num_rbs(); ++j) {
            const double s = reuse_interference_db(scenario, alloc, cand, j);
            if (s < best_s) {
                best_s = s;
                best = j;
            }
        }
        return best;
    });
}

Allocation bra(const Scenario& scenario, std::uint64_t seed, ModePolicy policy)
{
    std::mt19937_64 rng(seed);
    return run_allocation(scenario, policy, [&](const Allocation& alloc, int cell, int) {
        const auto options = least_loaded(alloc.reuse[static_cast<std::size_t>(cell)]);
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        return options[pick(rng)];
    });
}

Allocation cpa(const Scenario& scenario, ModePolicy policy)
{
    return run_allocation(scenario, policy, [&](const Allocation& alloc, int cell, int) {
        // g(j): gain to the BS of the cellular-mode transmitter on RB j.
        std::vector<std::optional<double>> g(static_cast<std::size_t>(scenario.num_rbs()));
        for (int l : scenario.links_in_cell(cell)) {
            const auto& a = alloc.links[static_cast<std::size_t>(l)];
            if (a.rb >= 0 && a.mode == Mode::Cellular)
                g[static_cast<std::size_t>(a.rb)] = scenario.gain_to_serving_bs(static_cast<std::size_t>(l));
        }
        const auto options = least_loaded(alloc.reuse[static_cast<std::size_t>(cell)]);
        int best = options.front();
        double best_g = -std::numeric_limits<double>::infinity();
        for (int j : options) {
            const auto& gj = g[static_cast<std::size_t>(j)];
            if (gj && *gj > best_g) {
                best_g = *gj;
                best = j;
            }
        }
        return best;
    });
}

Allocation apply_mode_policy(const Scenario& scenario, Allocation allocation, ModePolicy policy)
{
    check_orthogonality_possible(scenario, policy);
    for (std::size_t l = 0; l < scenario.num_links(); ++l) {
        if (!scenario.link(l).is_d2d())
            continue;
        auto& a = allocation.links[l];
        if (policy == ModePolicy::ForcedCellular) {
            if (!a.dedicated)
                throw InfeasibleError("forced cellular mode: link " + std::to_string(l) + " reuses an RB");
            a.mode = Mode::Cellular;
        } else if (policy == ModePolicy::ForcedD2D) {
            a.mode = Mode::Direct;
        }
    }
    allocation.policy = policy;
    return allocation;
}

Allocation allocate(const Scenario& scenario, Scheme scheme, ModePolicy policy, std::uint64_t seed)
{
    Allocation a;
    switch (scheme) {
    case Scheme::MinInterf: a = min_interf(scenario, policy); break;
    case Scheme::BRA: a = bra(scenario, seed, policy); break;
    case Scheme::CPA: a = cpa(scenario, policy); break;
    }
    return apply_mode_policy(scenario, std::move(a), policy);
}

} // namespace d2d::ra
