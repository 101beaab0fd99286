#include "d2d/topology.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <tuple>

namespace d2d {

void GeometryConfig::validate() const
{
    if (num_cells < 1)
        throw ConfigError("geometry.num_cells", "must be >= 1");
    if (!(cell_radius > 0.0))
        throw ConfigError("geometry.cell_radius", "must be > 0");
    if (ues_per_cell < 0)
        throw ConfigError("geometry.ues_per_cell", "must be >= 0");
    if (d2d_pairs_per_cell < 0)
        throw ConfigError("geometry.d2d_pairs_per_cell", "must be >= 0");
    if (links_per_cell() < 1)
        throw ConfigError("geometry", "each cell needs at least one link");
    if (!(d2d_distance_min > 0.0) || d2d_distance_min > d2d_distance_max)
        throw ConfigError("geometry.d2d_distance_range", "must satisfy 0 < min <= max");
    if (num_rbs < 1)
        throw ConfigError("geometry.num_rbs", "must be >= 1");
    if (!(system_bandwidth > 0.0))
        throw ConfigError("geometry.system_bandwidth", "must be > 0");
    if (!(carrier_frequency > 0.0))
        throw ConfigError("geometry.carrier_frequency", "must be > 0");
}

void ChannelConfig::validate() const
{
    if (!(pathloss_exponent > 0.0))
        throw ConfigError("channel.pathloss_exponent", "must be > 0");
    if (!(shadowing_stddev_db >= 0.0))
        throw ConfigError("channel.shadowing_stddev_db", "must be >= 0");
    if (!std::isfinite(gain_at_1m_db))
        throw ConfigError("channel.gain_at_1m_db", "must be finite");
    if (!std::isfinite(noise_power_dbm))
        throw ConfigError("channel.noise_power_dbm", "must be finite");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_gain(double distance_m, double shadow_db, const ChannelConfig& channel)
{
    if (!(distance_m > 0.0))
        throw std::domain_error("path_gain: distance must be positive");
    const double d = std::max(distance_m, 1.0);
    const double gain_db = channel.gain_at_1m_db - 10.0 * channel.pathloss_exponent * std::log10(d) + shadow_db;
    return db_to_linear(gain_db);
}

Scenario::Scenario(GeometryConfig geometry, ChannelConfig channel)
    : geometry_(std::move(geometry)), channel_(std::move(channel))
{
}

std::vector<int> Scenario::links_in_cell(int cell) const
{
    std::vector<int> out;
    for (const auto& l : links_)
        if (l.cell == cell)
            out.push_back(l.id);
    return out;
}

std::size_t Scenario::receiver_of(std::size_t l, Mode mode) const
{
    const Link& lk = links_.at(l);
    if (mode == Mode::Direct) {
        if (!lk.is_d2d())
            throw InvariantError("cellular UE cannot use direct mode");
        return static_cast<std::size_t>(lk.d2d_receiver);
    }
    return static_cast<std::size_t>(lk.cell);
}

double Scenario::gain_d2d(std::size_t l) const { return gain(l, receiver_of(l, Mode::Direct)); }

int Scenario::add_base_station(Point p)
{
    // Base stations must precede D2D receivers so that receiver c == BS c.
    for (const auto& l : links_)
        if (l.is_d2d())
            throw InvariantError("base stations must be added before D2D pairs");
    receiver_pos_.push_back(p);
    return static_cast<int>(receiver_pos_.size()) - 1;
}

int Scenario::add_cellular_ue(int cell, Point tx)
{
    const int id = static_cast<int>(links_.size());
    links_.push_back(Link{id, cell, LinkClass::CellularUe, -1});
    tx_pos_.push_back(tx);
    return id;
}

int Scenario::add_d2d_pair(int cell, Point tx, Point rx)
{
    const int id = static_cast<int>(links_.size());
    receiver_pos_.push_back(rx);
    links_.push_back(Link{id, cell, LinkClass::D2dCandidate, static_cast<int>(receiver_pos_.size()) - 1});
    tx_pos_.push_back(tx);
    return id;
}

void Scenario::set_gain(std::size_t tx_link, std::size_t rx, double linear)
{
    if (!(linear > 0.0))
        throw std::domain_error("gain must be strictly positive");
    gain_.resize(links_.size() * receiver_pos_.size(), 0.0);
    gain_[tx_link * receiver_pos_.size() + rx] = linear;
}

std::vector<Point> hexagonal_sites(int num_cells, double cell_radius)
{
    // Axial hex coordinates, ordered by ring then by angle.
    const double isd = std::sqrt(3.0) * cell_radius;
    struct Site {
        int ring;
        double angle;
        Point p;
    };
    std::vector<Site> sites;
    int rings = 0;
    while (1 + 3 * rings * (rings + 1) < num_cells)
        ++rings;
    for (int q = -rings; q <= rings; ++q)
        for (int r = std::max(-rings, -q - rings); r <= std::min(rings, -q + rings); ++r) {
            const int ring = std::max({std::abs(q), std::abs(r), std::abs(q + r)});
            const Point p{isd * (q + r / 2.0), isd * (r * std::sqrt(3.0) / 2.0)};
            double angle = std::atan2(p.y, p.x);
            if (angle < 0.0)
                angle += 2.0 * std::numbers::pi;
            sites.push_back({ring, ring == 0 ? 0.0 : angle, p});
        }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return std::tie(a.ring, a.angle) < std::tie(b.ring, b.angle); });
    std::vector<Point> out;
    for (int i = 0; i < num_cells; ++i)
        out.push_back(sites[static_cast<std::size_t>(i)].p);
    return out;
}

namespace {

Point uniform_in_disc(std::mt19937_64& rng, Point centre, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double theta = 2.0 * std::numbers::pi * u(rng);
    return {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)};
}

} // namespace

Scenario generate_drop(const GeometryConfig& geometry, const ChannelConfig& channel, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Scenario sc(geometry, channel);
    const auto sites = hexagonal_sites(geometry.num_cells, geometry.cell_radius);
    for (const auto& s : sites)
        sc.add_base_station(s);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int c = 0; c < geometry.num_cells; ++c) {
        const Point bs = sites[static_cast<std::size_t>(c)];
        for (int i = 0; i < geometry.ues_per_cell; ++i)
            sc.add_cellular_ue(c, uniform_in_disc(rng, bs, geometry.cell_radius));
        for (int i = 0; i < geometry.d2d_pairs_per_cell; ++i) {
            const Point tx = uniform_in_disc(rng, bs, geometry.cell_radius);
            const double d = geometry.d2d_distance_min + (geometry.d2d_distance_max - geometry.d2d_distance_min) * u(rng);
            const double theta = 2.0 * std::numbers::pi * u(rng);
            sc.add_d2d_pair(c, tx, Point{tx.x + d * std::cos(theta), tx.y + d * std::sin(theta)});
        }
    }

    // One shadowing value per transmitter->receiver pair, frequency flat.
    std::normal_distribution<double> shadow(0.0, 1.0);
    std::vector<double> shadow_db(sc.num_links() * sc.num_receivers());
    for (auto& s : shadow_db)
        s = channel.shadowing_stddev_db * shadow(rng);
    const std::size_t nr = sc.num_receivers();
    sc.compute_gains([&](std::size_t t, std::size_t r) { return shadow_db[t * nr + r]; });
    return sc;
}

std::vector<CochannelGroup> build_cochannel_groups(const Scenario& scenario, const Allocation& allocation)
{
    if (allocation.links.size() != scenario.num_links())
        throw InvariantError("allocation does not cover every link");
    std::vector<std::vector<int>> by_rb(static_cast<std::size_t>(scenario.num_rbs()));
    for (std::size_t l = 0; l < scenario.num_links(); ++l) {
        const int rb = allocation.links[l].rb;
        if (rb < 0 || rb >= scenario.num_rbs())
            throw InvariantError("link " + std::to_string(l) + " has no assigned RB");
        by_rb[static_cast<std::size_t>(rb)].push_back(static_cast<int>(l));
    }

    std::vector<CochannelGroup> groups;
    for (int j = 0; j < scenario.num_rbs(); ++j) {
        const auto& members = by_rb[static_cast<std::size_t>(j)];
        if (members.empty())
            continue;
        CochannelGroup g;
        g.rb = j;
        g.members = members;
        g.bandwidth = scenario.rb_bandwidth();
        const std::size_t n = members.size();
        g.gain = SquareMatrix(n);
        g.noise.assign(n, scenario.noise_watts());
        for (std::size_t a = 0; a < n; ++a) {
            const auto la = static_cast<std::size_t>(members[a]);
            const Mode mode = allocation.links[la].mode;
            g.modes.push_back(mode);
            g.gain_to_serving_bs.push_back(scenario.gain_to_serving_bs(la));
            const std::size_t rx = scenario.receiver_of(la, mode);
            for (std::size_t b = 0; b < n; ++b)
                g.gain(a, b) = scenario.gain(static_cast<std::size_t>(members[b]), rx);
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

} // namespace d2d
