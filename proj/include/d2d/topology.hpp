#pragma once

#include "d2d/allocation.hpp"
#include "d2d/common.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace d2d {

struct GeometryConfig {
    int num_cells = 7;
    double cell_radius = 500.0;       ///< m
    int ues_per_cell = 6;
    int d2d_pairs_per_cell = 6;
    double d2d_distance_min = 50.0;   ///< m
    double d2d_distance_max = 100.0;  ///< m
    int num_rbs = 8;
    double system_bandwidth = 5e6;    ///< Hz
    double carrier_frequency = 2e9;   ///< Hz, informational only

    double rb_bandwidth() const { return system_bandwidth / num_rbs; }
    int links_per_cell() const { return ues_per_cell + d2d_pairs_per_cell; }
    void validate() const;
    bool operator==(const GeometryConfig&) const = default;
};

struct ChannelConfig {
    double gain_at_1m_db = -37.0;
    double pathloss_exponent = 3.5;
    double shadowing_stddev_db = 6.0;
    double noise_power_dbm = -114.0;

    double noise_watts() const { return dbm_to_watts(noise_power_dbm); }
    void validate() const;
    bool operator==(const ChannelConfig&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

enum class LinkClass { CellularUe, D2dCandidate };

struct Link {
    int id = 0;
    int cell = 0;
    LinkClass cls = LinkClass::CellularUe;
    int d2d_receiver = -1; ///< receiver index of the D2D peer, -1 for cellular UEs

    bool is_d2d() const { return cls == LinkClass::D2dCandidate; }
    bool operator==(const Link&) const = default;
};

/// Path gain in linear scale. Distances below 1 m are evaluated at 1 m.
/// Throws std::domain_error for non-positive distances.
double path_gain(double distance_m, double shadow_db, const ChannelConfig& channel);

/// One Monte Carlo drop.
///
/// Receivers are numbered with the base stations first (receiver c is the BS
/// of cell c) followed by the D2D receivers. Every link owns exactly one
/// transmitter, so transmitter index == link id. The gain table stores the
/// linear gain from every transmitter to every receiver.
class Scenario {
public:
    Scenario(GeometryConfig geometry, ChannelConfig channel);

    const GeometryConfig& geometry() const { return geometry_; }
    const ChannelConfig& channel() const { return channel_; }

    int num_cells() const { return geometry_.num_cells; }
    int num_rbs() const { return geometry_.num_rbs; }
    std::size_t num_links() const { return links_.size(); }
    std::size_t num_receivers() const { return receiver_pos_.size(); }

    const std::vector<Link>& links() const { return links_; }
    const Link& link(std::size_t l) const { return links_.at(l); }
    std::vector<int> links_in_cell(int cell) const;

    Point bs_position(int cell) const { return receiver_pos_.at(static_cast<std::size_t>(cell)); }
    Point tx_position(std::size_t l) const { return tx_pos_.at(l); }
    Point receiver_position(std::size_t r) const { return receiver_pos_.at(r); }

    /// Linear gain from the transmitter of link `tx_link` to receiver `rx`.
    double gain(std::size_t tx_link, std::size_t rx) const { return gain_[tx_link * receiver_pos_.size() + rx]; }
    double gain_db(std::size_t tx_link, std::size_t rx) const { return linear_to_db(gain(tx_link, rx)); }

    /// Receiver used by link l in the given mode (serving BS or D2D peer).
    std::size_t receiver_of(std::size_t l, Mode mode) const;
    double gain_to_serving_bs(std::size_t l) const { return gain(l, static_cast<std::size_t>(links_[l].cell)); }
    double gain_d2d(std::size_t l) const;

    double noise_watts() const { return channel_.noise_watts(); }
    double rb_bandwidth() const { return geometry_.rb_bandwidth(); }

    bool operator==(const Scenario&) const = default;

    // Construction interface, used by generate_drop and by tests that build
    // hand-made instances.
    int add_base_station(Point p);
    int add_cellular_ue(int cell, Point tx);
    int add_d2d_pair(int cell, Point tx, Point rx);
    /// Fills the gain table from geometry; shadow_db(tx, rx) supplies shadowing.
    template <class ShadowFn>
    void compute_gains(ShadowFn&& shadow_db)
    {
        const std::size_t nr = receiver_pos_.size();
        gain_.assign(links_.size() * nr, 0.0);
        for (std::size_t t = 0; t < links_.size(); ++t)
            for (std::size_t r = 0; r < nr; ++r)
                gain_[t * nr + r] = path_gain(std::max(distance(tx_pos_[t], receiver_pos_[r]), 1.0), shadow_db(t, r), channel_);
    }
    void set_gain(std::size_t tx_link, std::size_t rx, double linear);

private:
    GeometryConfig geometry_;
    ChannelConfig channel_;
    std::vector<Link> links_;
    std::vector<Point> tx_pos_;
    std::vector<Point> receiver_pos_;
    std::vector<double> gain_;
};

/// Hexagonal BS layout: cell 0 at the origin, the first ring at inter-site
/// distance sqrt(3) * cell_radius. Supports up to 19 cells (two rings).
std::vector<Point> hexagonal_sites(int num_cells, double cell_radius);

/// Deterministic drop for (geometry, channel, seed) using std::mt19937_64.
Scenario generate_drop(const GeometryConfig& geometry, const ChannelConfig& channel, std::uint64_t seed);

/// Links sharing one RB network-wide.
///
/// gain(a, b) is the gain from the transmitter of member b to the receiver of
/// member a, where each member's receiver follows its selected mode.
struct CochannelGroup {
    int rb = 0;
    std::vector<int> members;
    std::vector<Mode> modes;
    SquareMatrix gain;
    std::vector<double> noise;
    std::vector<double> gain_to_serving_bs;
    double bandwidth = 0.0;

    std::size_t size() const { return members.size(); }
};

/// One group per RB that carries at least one link, ordered by RB index.
/// Throws InvariantError when a link has no RB.
std::vector<CochannelGroup> build_cochannel_groups(const Scenario& scenario, const Allocation& allocation);

} // namespace d2d
