#include "d2d/sim.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace d2d::sim {

const char* to_string(CellularPc s) { return s == CellularPc::OFPC ? "OFPC" : "UtilityMax"; }

const char* to_string(D2dPc s)
{
    switch (s) {
    case D2dPc::NPC: return "NPC";
    case D2dPc::FST: return "FST";
    case D2dPc::OFPC: return "OFPC";
    case D2dPc::CL: return "CL";
    case D2dPc::UtilityMax: return "UtilityMax";
    }
    return "?";
}

void ExperimentConfig::validate() const
{
    geometry.validate();
    channel.validate();
    utility.validate();
    lte.validate();
    if (geometry.ues_per_cell > geometry.num_rbs)
        throw ConfigError("geometry.ues_per_cell", "must not exceed geometry.num_rbs");
    if (num_drops < 1)
        throw ConfigError("num_drops", "must be >= 1");
    if (cl_iterations < 0)
        throw ConfigError("lte.cl_iterations", "must be >= 0");
}

CdfSummary::CdfSummary(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw std::invalid_argument("CDF of an empty sample set");
    std::sort(sorted_.begin(), sorted_.end());
}

double CdfSummary::percentile(double p) const
{
    p = std::clamp(p, 0.0, 1.0);
    const double pos = p * static_cast<double>(sorted_.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted_.size())
        return sorted_.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted_[lo] + frac * (sorted_[lo + 1] - sorted_[lo]);
}

double CdfSummary::mean() const { return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size()); }

CdfSummary compute_cdf(std::span<const double> samples) { return CdfSummary(std::vector<double>(samples.begin(), samples.end())); }

namespace {

enum class Control { Ofpc, Fst, Npc, Cl, Utility };

Control control_for(const ExperimentConfig& cfg, Mode mode)
{
    if (mode == Mode::Cellular)
        return cfg.cellular_pc == CellularPc::OFPC ? Control::Ofpc : Control::Utility;
    switch (cfg.d2d_pc) {
    case D2dPc::NPC: return Control::Npc;
    case D2dPc::FST: return Control::Fst;
    case D2dPc::OFPC: return Control::Ofpc;
    case D2dPc::CL: return Control::Cl;
    case D2dPc::UtilityMax: return Control::Utility;
    }
    return Control::Ofpc;
}

double lte_power_dbm(const lte::LtePcConfig& base, lte::Scheme scheme, double gain_db)
{
    lte::LtePcConfig c = base;
    c.scheme = scheme;
    return lte::open_loop_power(c, gain_db);
}

std::uint64_t mix_seed(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

PowerPlan run_power_control(const Scenario& scenario, const Allocation& allocation, const ExperimentConfig& cfg)
{
    PowerPlan plan;
    plan.power_w.assign(scenario.num_links(), 0.0);
    plan.clamped.assign(scenario.num_links(), false);

    for (const auto& group : build_cochannel_groups(scenario, allocation)) {
        const std::size_t n = group.size();
        std::vector<Control> ctl(n);
        std::vector<double> p(n, 0.0);
        bool any_utility = false;
        bool any_cl = false;
        for (std::size_t a = 0; a < n; ++a) {
            ctl[a] = control_for(cfg, group.modes[a]);
            const double g_db = linear_to_db(group.gain(a, a));
            switch (ctl[a]) {
            case Control::Ofpc: p[a] = dbm_to_watts(lte_power_dbm(cfg.lte, lte::Scheme::OFPC, g_db)); break;
            case Control::Fst: p[a] = dbm_to_watts(lte_power_dbm(cfg.lte, lte::Scheme::FST, g_db)); break;
            case Control::Npc: p[a] = dbm_to_watts(lte_power_dbm(cfg.lte, lte::Scheme::NPC, g_db)); break;
            case Control::Cl:
                p[a] = dbm_to_watts(lte_power_dbm(cfg.lte, lte::Scheme::FST, g_db));
                any_cl = true;
                break;
            case Control::Utility: any_utility = true; break;
            }
        }

        const auto env = utility::LinkEnvironment::from_group(group);
        if (any_utility) {
            std::vector<utility::LinkControl> lc(n);
            for (std::size_t a = 0; a < n; ++a)
                lc[a] = ctl[a] == Control::Utility ? utility::LinkControl::Utility : utility::LinkControl::Fixed;
            const auto res = utility::run_distributed_pc(env, cfg.utility, lc, p);
            for (std::size_t a = 0; a < n; ++a)
                if (ctl[a] == Control::Utility) {
                    p[a] = res.state.power[a];
                    plan.clamped[static_cast<std::size_t>(group.members[a])] = res.clamped[a];
                }
        }

        if (any_cl) {
            // Synchronous TPC rounds: every CL link reacts to the SINR of the
            // previous round while all other powers stay put.
            std::vector<lte::ClLoopState> st(n);
            for (std::size_t a = 0; a < n; ++a)
                st[a].power_dbm = watts_to_dbm(p[a]);
            const double target = cfg.lte.gamma_tgt_db.value_or(15.0);
            for (int it = 0; it < cfg.cl_iterations; ++it) {
                const auto gamma = utility::sinr_all(p, env);
                for (std::size_t a = 0; a < n; ++a)
                    if (ctl[a] == Control::Cl)
                        st[a] = lte::closed_loop_update(st[a], target, linear_to_db(gamma[a]), cfg.lte);
                for (std::size_t a = 0; a < n; ++a)
                    if (ctl[a] == Control::Cl)
                        p[a] = dbm_to_watts(st[a].power_dbm);
            }
        }

        for (std::size_t a = 0; a < n; ++a)
            plan.power_w[static_cast<std::size_t>(group.members[a])] = p[a];
    }
    return plan;
}

DropMetrics measure(const Scenario& scenario, const Allocation& allocation, const PowerPlan& plan)
{
    DropMetrics out;
    const double w = scenario.rb_bandwidth();
    for (std::size_t l = 0; l < scenario.num_links(); ++l) {
        const auto& a = allocation.links[l];
        const std::size_t rx = scenario.receiver_of(l, a.mode);
        double interference = scenario.noise_watts();
        for (std::size_t m = 0; m < scenario.num_links(); ++m)
            if (m != l && allocation.links[m].rb == a.rb)
                interference += scenario.gain(m, rx) * plan.power_w[m];
        const double gamma = scenario.gain(l, rx) * plan.power_w[l] / interference;

        LinkMetrics lm;
        lm.link = static_cast<int>(l);
        lm.cls = scenario.link(l).cls;
        lm.mode = a.mode;
        lm.rb = a.rb;
        lm.dedicated = a.dedicated;
        lm.sinr_db = linear_to_db(gamma);
        lm.power_w = plan.power_w[l];
        lm.power_dbm = watts_to_dbm(plan.power_w[l]);
        lm.rate_bps = w * std::log2(1.0 + gamma);
        lm.clamped = plan.clamped[l];
        out.sum_rate_bps += lm.rate_bps;
        out.sum_power_w += lm.power_w;
        out.links.push_back(lm);
    }
    return out;
}

DropMetrics run_drop(const ExperimentConfig& cfg, std::uint64_t drop_seed)
{
    cfg.validate();
    const Scenario sc = generate_drop(cfg.geometry, cfg.channel, drop_seed);
    const Allocation alloc = ra::allocate(sc, cfg.ra_scheme, cfg.mode_policy, mix_seed(drop_seed));
    return measure(sc, alloc, run_power_control(sc, alloc, cfg));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads)
{
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;
    res.drops.resize(static_cast<std::size_t>(cfg.num_drops));

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.num_drops));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (int i = next++; i < cfg.num_drops; i = next++) {
            try {
                res.drops[static_cast<std::size_t>(i)] = run_drop(cfg, cfg.seed + static_cast<std::uint64_t>(i));
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure)
                    failure = std::current_exception();
                next = cfg.num_drops;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return res;
}

SampleTable ExperimentResult::samples() const
{
    SampleTable t;
    for (const auto& d : drops) {
        for (const auto& l : d.links) {
            std::vector<std::string> classes;
            if (l.cls == LinkClass::CellularUe) {
                classes = {"cellular"};
            } else {
                classes = {"d2d", l.mode == Mode::Direct ? "d2d-direct" : "d2d-cellular"};
            }
            for (const auto& c : classes) {
                t[c]["sinr_db"].push_back(l.sinr_db);
                t[c]["power_dbm"].push_back(l.power_dbm);
                t[c]["rate_bps"].push_back(l.rate_bps);
            }
        }
        t["system"]["sum_rate_bps"].push_back(d.sum_rate_bps);
        t["system"]["sum_power_w"].push_back(d.sum_power_w);
    }
    return t;
}

double ExperimentResult::mean_sum_rate_bps() const
{
    double s = 0.0;
    for (const auto& d : drops)
        s += d.sum_rate_bps;
    return drops.empty() ? 0.0 : s / static_cast<double>(drops.size());
}

double ExperimentResult::mean_sum_power_w() const
{
    double s = 0.0;
    for (const auto& d : drops)
        s += d.sum_power_w;
    return drops.empty() ? 0.0 : s / static_cast<double>(drops.size());
}

} // namespace d2d::sim
