#pragma once

#include "d2d/lte_pc.hpp"
#include "d2d/ra.hpp"
#include "d2d/topology.hpp"
#include "d2d/utility_pc.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace d2d::sim {

enum class CellularPc { OFPC, UtilityMax };
enum class D2dPc { NPC, FST, OFPC, CL, UtilityMax };

const char* to_string(CellularPc s);
const char* to_string(D2dPc s);

struct ExperimentConfig {
    GeometryConfig geometry;
    ChannelConfig channel;
    ra::Scheme ra_scheme = ra::Scheme::BRA;
    ModePolicy mode_policy = ModePolicy::Adaptive;
    CellularPc cellular_pc = CellularPc::OFPC;
    D2dPc d2d_pc = D2dPc::OFPC;
    utility::UtilityPcConfig utility;
    lte::LtePcConfig lte;
    int cl_iterations = 10;
    int num_drops = 100;
    std::uint64_t seed = 1;

    /// LTE open loop for cellular-mode links, utility maximization for D2D.
    bool is_hybrid() const { return cellular_pc == CellularPc::OFPC && d2d_pc == D2dPc::UtilityMax; }
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

struct LinkMetrics {
    int link = 0;
    LinkClass cls = LinkClass::CellularUe;
    Mode mode = Mode::Cellular;
    int rb = -1;
    bool dedicated = true;
    double sinr_db = 0.0;
    double power_w = 0.0;
    double power_dbm = 0.0;
    double rate_bps = 0.0;
    bool clamped = false;
};

struct DropMetrics {
    std::vector<LinkMetrics> links;
    double sum_rate_bps = 0.0;
    double sum_power_w = 0.0;
};

/// Sorted samples with linearly interpolated percentiles.
class CdfSummary {
public:
    explicit CdfSummary(std::vector<double> samples);

    /// p in [0, 1]; percentile(0) is the minimum, percentile(1) the maximum.
    double percentile(double p) const;
    double mean() const;
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

/// Throws std::invalid_argument on an empty sample set.
CdfSummary compute_cdf(std::span<const double> samples);

/// Pooled samples keyed by class ("cellular", "d2d", "d2d-direct",
/// "d2d-cellular", "system") and then by measure.
using SampleTable = std::map<std::string, std::map<std::string, std::vector<double>>>;

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<DropMetrics> drops;

    SampleTable samples() const;
    double mean_sum_rate_bps() const;
    double mean_sum_power_w() const;
};

/// Transmit powers (W) chosen for every link of one drop, indexed by link id.
struct PowerPlan {
    std::vector<double> power_w;
    std::vector<bool> clamped;
};

/// Runs power control on every co-channel group of an allocated drop.
PowerPlan run_power_control(const Scenario& scenario, const Allocation& allocation, const ExperimentConfig& cfg);

/// Per-link metrics from the joint final power vector.
DropMetrics measure(const Scenario& scenario, const Allocation& allocation, const PowerPlan& plan);

DropMetrics run_drop(const ExperimentConfig& cfg, std::uint64_t drop_seed);

/// num_drops drops with seeds seed + i, executed on `threads` workers
/// (0 = hardware concurrency). Output order follows the drop index.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

} // namespace d2d::sim
