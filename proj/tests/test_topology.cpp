#include "d2d/topology.hpp"

#include "doctest.h"

#include <random>
#include <set>

using namespace d2d;

TEST_CASE("path gain formula")
{
    ChannelConfig ch;
    CHECK(path_gain(1.0, 0.0, ch) == doctest::Approx(1.9952623149688786e-4).epsilon(1e-12));
    CHECK(linear_to_db(path_gain(10.0, 0.0, ch)) == doctest::Approx(-72.0).epsilon(1e-12));
    CHECK(path_gain(0.5, 0.0, ch) == path_gain(1.0, 0.0, ch));
    CHECK(linear_to_db(path_gain(10.0, 6.0, ch)) == doctest::Approx(-66.0).epsilon(1e-12));
    CHECK_THROWS_AS(path_gain(0.0, 0.0, ch), std::domain_error);
    CHECK_THROWS_AS(path_gain(-3.0, 0.0, ch), std::domain_error);
}

TEST_CASE("hexagonal layout")
{
    const auto sites = hexagonal_sites(7, 500.0);
    REQUIRE(sites.size() == 7);
    CHECK(sites[0] == Point{0.0, 0.0});
    for (std::size_t i = 1; i < 7; ++i)
        CHECK(distance(sites[0], sites[i]) == doctest::Approx(500.0 * std::sqrt(3.0)));
    // Ring neighbours are one inter-site distance apart.
    for (std::size_t i = 1; i < 7; ++i)
        CHECK(distance(sites[i], sites[i % 6 + 1]) == doctest::Approx(500.0 * std::sqrt(3.0)));
    CHECK(hexagonal_sites(1, 100.0).size() == 1);
    CHECK(hexagonal_sites(19, 100.0).size() == 19);
}

TEST_CASE("default drop has the expected counts and valid geometry")
{
    GeometryConfig g;
    ChannelConfig ch;
    const auto sc = generate_drop(g, ch, 1);
    CHECK(sc.num_links() == 84);
    CHECK(sc.num_receivers() == 7 + 42);
    int ues = 0, pairs = 0;
    for (std::size_t l = 0; l < sc.num_links(); ++l) {
        const auto& lk = sc.link(l);
        CHECK(distance(sc.tx_position(l), sc.bs_position(lk.cell)) <= g.cell_radius + 1e-9);
        if (lk.is_d2d()) {
            ++pairs;
            const double d = distance(sc.tx_position(l), sc.receiver_position(static_cast<std::size_t>(lk.d2d_receiver)));
            CHECK(d >= g.d2d_distance_min - 1e-9);
            CHECK(d <= g.d2d_distance_max + 1e-9);
        } else {
            ++ues;
        }
        for (std::size_t r = 0; r < sc.num_receivers(); ++r)
            CHECK(sc.gain(l, r) > 0.0);
    }
    CHECK(ues == 42);
    CHECK(pairs == 42);
    CHECK(sc.rb_bandwidth() == doctest::Approx(625e3));
}

TEST_CASE("drops are deterministic per seed")
{
    GeometryConfig g;
    ChannelConfig ch;
    CHECK(generate_drop(g, ch, 42) == generate_drop(g, ch, 42));
    CHECK_FALSE(generate_drop(g, ch, 42) == generate_drop(g, ch, 43));
}

TEST_CASE("degenerate single-link drop")
{
    GeometryConfig g;
    g.num_cells = 1;
    g.ues_per_cell = 1;
    g.d2d_pairs_per_cell = 0;
    const auto sc = generate_drop(g, ChannelConfig{}, 5);
    CHECK(sc.num_links() == 1);
    CHECK(sc.num_receivers() == 1);
}

TEST_CASE("shadowing statistics")
{
    GeometryConfig g;
    ChannelConfig ch;
    ChannelConfig flat = ch;
    flat.shadowing_stddev_db = 0.0;
    // Same seed: positions match, so the dB difference is the shadow sample.
    const auto a = generate_drop(g, ch, 9);
    const auto b = generate_drop(g, flat, 9);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t l = 0; l < a.num_links(); ++l)
        for (std::size_t r = 0; r < a.num_receivers(); ++r) {
            if (distance(a.tx_position(l), a.receiver_position(r)) < 1.0)
                continue;
            const double s = a.gain_db(l, r) - b.gain_db(l, r);
            sum += s;
            sq += s * s;
            ++n;
        }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.2);
    CHECK(sd == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("config validation names the offending key")
{
    GeometryConfig g;
    g.cell_radius = -1.0;
    try {
        g.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "geometry.cell_radius");
    }
    g = GeometryConfig{};
    g.d2d_distance_min = 120.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    ChannelConfig ch;
    ch.pathloss_exponent = 0.0;
    CHECK_THROWS_AS(ch.validate(), ConfigError);
}

namespace {

Scenario two_cell_scenario()
{
    GeometryConfig g;
    g.num_cells = 2;
    g.ues_per_cell = 1;
    g.d2d_pairs_per_cell = 1;
    g.num_rbs = 2;
    Scenario sc(g, ChannelConfig{});
    sc.add_base_station({0, 0});
    sc.add_base_station({1000, 0});
    sc.add_cellular_ue(0, {100, 0});
    sc.add_cellular_ue(1, {900, 0});
    sc.add_d2d_pair(0, {0, 200}, {0, 260});
    sc.add_d2d_pair(1, {1000, 200}, {1000, 260});
    sc.compute_gains([](std::size_t, std::size_t) { return 0.0; });
    return sc;
}

} // namespace

TEST_CASE("co-channel groups")
{
    const auto sc = two_cell_scenario();
    Allocation a(sc.num_links(), 2, 2);
    a.links[0] = {0, Mode::Cellular, true};
    a.links[1] = {0, Mode::Cellular, true};
    a.links[2] = {1, Mode::Cellular, true};
    a.links[3] = {1, Mode::Direct, true};
    auto groups = build_cochannel_groups(sc, a);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].members == std::vector<int>{0, 1});
    CHECK(groups[0].gain.size() == 2);
    CHECK(groups[0].gain(0, 1) == sc.gain(1, 0)); // UE of cell 1 into BS 0
    CHECK(groups[0].bandwidth == doctest::Approx(sc.rb_bandwidth()));
    // Cellular-mode D2D row uses the serving BS, direct-mode row the peer.
    CHECK(groups[1].gain(0, 0) == sc.gain_to_serving_bs(2));
    CHECK(groups[1].gain(1, 1) == sc.gain_d2d(3));
    CHECK(groups[1].gain(1, 0) == sc.gain(2, sc.receiver_of(3, Mode::Direct)));

    // Empty RB is omitted.
    for (auto& l : a.links)
        l.rb = 0;
    groups = build_cochannel_groups(sc, a);
    CHECK(groups.size() == 1);
    CHECK(groups[0].size() == 4);

    a.links[2].rb = -1;
    CHECK_THROWS_AS(build_cochannel_groups(sc, a), InvariantError);
}

TEST_CASE("groups partition the links of a random allocation")
{
    const auto sc = generate_drop(GeometryConfig{}, ChannelConfig{}, 3);
    Allocation a(sc.num_links(), sc.num_cells(), sc.num_rbs());
    std::mt19937_64 rng(3);
    for (auto& l : a.links)
        l.rb = static_cast<int>(rng() % 8);
    std::multiset<int> seen;
    for (const auto& g : build_cochannel_groups(sc, a)) {
        for (int m : g.members) {
            CHECK(a.links[static_cast<std::size_t>(m)].rb == g.rb);
            seen.insert(m);
        }
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(g.gain(i, i) > 0.0);
    }
    CHECK(seen.size() == sc.num_links());
    CHECK(std::set<int>(seen.begin(), seen.end()).size() == sc.num_links());
}

TEST_CASE("cellular UE has no direct receiver")
{
    const auto sc = two_cell_scenario();
    CHECK_THROWS_AS(sc.receiver_of(0, Mode::Direct), InvariantError);
    CHECK(sc.receiver_of(0, Mode::Cellular) == 0);
    CHECK(sc.receiver_of(3, Mode::Cellular) == 1);
}
