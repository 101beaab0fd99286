#include "d2d/utility_pc.hpp"

#include "d2d/oracle.hpp"
#include "instances.hpp"

#include "doctest.h"

#include <random>
#include <sstream>

using namespace d2d;
using namespace d2d::utility;
using d2d::testing::max_rel_err;
using d2d::testing::to_env;

namespace {

LinkEnvironment make_env(std::vector<std::vector<double>> g, std::vector<double> noise, double w = 625e3)
{
    LinkEnvironment env;
    env.gain = SquareMatrix(noise.size());
    for (std::size_t a = 0; a < noise.size(); ++a)
        for (std::size_t b = 0; b < noise.size(); ++b)
            env.gain(a, b) = g[a][b];
    env.noise = std::move(noise);
    env.bandwidth = w;
    return env;
}

oracle::Instance to_inst(const LinkEnvironment& env) { return {env.gain, env.noise, env.bandwidth}; }

const double kN0 = dbm_to_watts(-114.0);

} // namespace

TEST_CASE("sinr examples")
{
    const auto one = make_env({{1e-7}}, {kN0});
    const std::vector<double> p{0.01};
    CHECK(sinr(p, one, 0) == doctest::Approx(1e-9 / kN0).epsilon(1e-12));
    CHECK(sinr(p, one, 0) == doctest::Approx(2.512e5).epsilon(1e-3));

    const auto iso = make_env({{1e-8, 0.0}, {0.0, 2e-8}}, {1e-14, 1e-14});
    const std::vector<double> p2{0.1, 0.2};
    CHECK(sinr(p2, iso, 0) == doctest::Approx(1e-9 / 1e-14));
    CHECK(sinr(p2, iso, 1) == doctest::Approx(4e-9 / 1e-14));

    const auto sym = make_env({{1.0, 0.5}, {0.5, 1.0}}, {1.0, 1.0});
    const auto g = sinr_all(std::vector<double>{1.0, 1.0}, sym);
    CHECK(g[0] == doctest::Approx(2.0 / 3.0));
    CHECK(g[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sinr from total received power")
{
    CHECK(sinr_from_total(2.0, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(sinr_from_total(1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(sinr_from_total(0.5, 1.0, 1.0), std::domain_error);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto r = d2d::testing::random_instance(rng, 4, 0.5);
        const auto env = to_env(r.inst);
        std::vector<double> p(4);
        for (auto& x : p)
            x = 0.2 * u(rng) + 1e-4;
        for (std::size_t l = 0; l < 4; ++l) {
            double total = env.noise[l];
            for (std::size_t m = 0; m < 4; ++m)
                total += env.gain(l, m) * p[m];
            CHECK(sinr_from_total(total, p[l], env.gain(l, l)) == doctest::Approx(sinr(p, env, l)).epsilon(1e-10));
        }
    }
}

TEST_CASE("rate to SINR target")
{
    CHECK(rate_to_sinr_target(625e3, 625e3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rate_to_sinr_target(0.0, 625e3) == 0.0);
    CHECK(rate_to_sinr_target(3 * 625e3, 625e3) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("inner power step")
{
    UtilityPcConfig cfg;
    CHECK(inner_power_step(0.01, 2.0, 1.0, cfg) == doctest::Approx(0.02));
    CHECK(inner_power_step(0.15, 4.0, 1.0, cfg) == cfg.p_max_w);
    CHECK(inner_power_step(1e-4, 1.0, 1e3, cfg) == cfg.p_min_w);

    // L = 1: one step lands on gamma sigma / G.
    const auto env = make_env({{1e-9}}, {kN0});
    const double gamma_tgt = 100.0;
    std::vector<double> p{0.01};
    p[0] = inner_power_step(p[0], gamma_tgt, sinr(p, env, 0), cfg);
    CHECK(p[0] == doctest::Approx(gamma_tgt * kN0 / 1e-9).epsilon(1e-12));

    // Hybrid cap.
    cfg.i_star_w = 500.0 * kN0;
    CHECK(power_cap(cfg, 1e-10) == doctest::Approx(500.0 * kN0 / 1e-10));
    CHECK(power_cap(cfg, 1e-10) == doctest::Approx(0.0199).epsilon(1e-3));
    CHECK(inner_power_step(0.01, 100.0, 1.0, cfg, 1e-10) == doctest::Approx(500.0 * kN0 / 1e-10));
    CHECK(inner_power_step(0.01, 1.0, 1.0, cfg, 1e-10) == doctest::Approx(0.01));
    // No cap gain means no cap.
    CHECK(inner_power_step(0.01, 10.0, 1.0, cfg, 0.0) == doctest::Approx(0.1));
    // The cap wins over the lower clamp.
    cfg.i_star_w = 1e-20;
    CHECK(inner_power_step(0.01, 1.0, 1.0, cfg, 1e-10) == doctest::Approx(1e-10));
}

TEST_CASE("reverse-link SINR")
{
    const auto one = make_env({{1e-9}}, {kN0});
    CHECK(gamma_cc(std::vector<double>{0.3}, one, 0) == doctest::Approx(0.3 * 1e-9 / kN0));

    // Equal noise: the denominator uses column sums of the gain matrix.
    const auto env = make_env({{1.0, 0.2, 0.1}, {0.3, 2.0, 0.4}, {0.05, 0.6, 1.5}}, {0.5, 0.5, 0.5});
    const std::vector<double> mu{1.0, 2.0, 3.0};
    CHECK(gamma_cc(mu, env, 0) == doctest::Approx(1.0 * 1.0 / (0.5 + 0.3 * 2.0 + 0.05 * 3.0)));
    CHECK(gamma_cc(mu, env, 1) == doctest::Approx(2.0 * 2.0 / (0.5 + 0.2 * 1.0 + 0.6 * 3.0)));
}

TEST_CASE("mu step")
{
    CHECK(mu_step(0.5, 2.0, 2.0) == 0.5);
    CHECK(mu_step(0.5, 4.0, 2.0) == 1.0);
    const auto env = make_env({{1e-9}}, {kN0});
    const auto mu = d2d::testing::iterate_mu(env, std::vector<double>{50.0}, 1);
    CHECK(mu[0] == doctest::Approx(50.0 * kN0 / 1e-9).epsilon(1e-12));
}

TEST_CASE("mu iteration converges to the linear-system solution")
{
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep % 5;
        const auto r = d2d::testing::random_instance(rng, n, 0.1 + 0.8 * (rep % 10) / 10.0);
        const auto env = to_env(r.inst);
        const auto mu = d2d::testing::iterate_mu(env, r.gamma, 2000);
        CHECK(max_rel_err(mu, oracle::solve_mu_fixed_point(r.gamma, r.inst)) <= 1e-6);
    }
}

TEST_CASE("recovered LP duals")
{
    // L = 1: the LP dual is exactly omega.
    const auto one = make_env({{1e-9}}, {kN0});
    const std::vector<double> g{40.0};
    const std::vector<double> mu{40.0 * kN0 / 1e-9};
    CHECK(recover_lambda_lp(mu, one, g, 1.0)[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(recover_lambda_lp(mu, one, g, 3.5)[0] == doctest::Approx(3.5).epsilon(1e-12));

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rep % 2;
        const auto r = d2d::testing::random_instance(rng, n, 0.6);
        const auto env = to_env(r.inst);
        const auto mu_star = d2d::testing::iterate_mu(env, r.gamma, 3000);
        const double omega = 0.5 + rep;
        const auto lam = recover_lambda_lp(mu_star, env, r.gamma, omega);
        const auto lam2 = recover_lambda_lp(mu_star, env, r.gamma, 2.0 * omega);
        for (std::size_t l = 0; l < n; ++l)
            CHECK(lam2[l] == doctest::Approx(2.0 * lam[l]).epsilon(1e-14));

        // Independent LP solution by vertex enumeration.
        const auto lp = oracle::build_lp(r.gamma, r.inst, omega);
        const auto sol = oracle::lp_enumerate(lp);
        CHECK(sol.all_constraints_active);
        CHECK(max_rel_err(lam, sol.dual) <= 1e-6);
        CHECK(max_rel_err(lam, oracle::lp_dual_equality(lp)) <= 1e-6);
        // Inequality (20) holds with equality at the optimum.
        const auto rep_check = oracle::lp_duality_check(sol.primal, lam, lp);
        CHECK(rep_check.dual_feasible);
        CHECK(rep_check.max_dual_violation >= -1e-9);
    }
}

TEST_CASE("lambda prefactor and recovery")
{
    CHECK(lambda_prefactor(0.0) == 1.0);
    CHECK(lambda_prefactor(1e-12) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(lambda_prefactor(1.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(lambda_prefactor(1e-7) == doctest::Approx(1.0 + 0.5e-7).epsilon(1e-13));
    CHECK(lambda_prefactor(9.9e-9) == doctest::Approx(std::log1p(9.9e-9) * (1.0 + 9.9e-9) / 9.9e-9).epsilon(1e-15));

    // Single link closed form: lambda = (1+g) ln(1+g) omega sigma / G.
    const double G = 1e-10, omega = 2.0, gamma = 30.0;
    const auto env = make_env({{G}}, {kN0});
    const std::vector<double> gv{gamma};
    const std::vector<double> p{gamma * kN0 / G};
    const std::vector<double> mu{gamma * kN0 / G};
    const auto lam = recover_lambda(p, gv, recover_lambda_lp(mu, env, gv, omega));
    CHECK(lam[0] == doctest::Approx((1.0 + gamma) * std::log1p(gamma) * omega * kN0 / G).epsilon(1e-12));
}

TEST_CASE("recovered lambda equals the envelope gradient")
{
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t n = 2 + rep % 3;
        const auto r = d2d::testing::random_instance(rng, n, 0.5);
        const auto env = to_env(r.inst);
        std::vector<double> log_rate(n);
        for (std::size_t l = 0; l < n; ++l)
            log_rate[l] = std::log(env.bandwidth * std::log2(1.0 + r.gamma[l]));
        const double omega = 1.5;
        const auto p = d2d::testing::iterate_power(env, r.gamma, 3000);
        const auto mu = d2d::testing::iterate_mu(env, r.gamma, 3000);
        const auto lam = recover_lambda(p, r.gamma, recover_lambda_lp(mu, env, r.gamma, omega));
        const auto fd = oracle::finite_diff_envelope(log_rate, r.inst, omega);
        CHECK(max_rel_err(lam, fd) <= 1e-3);
    }
}

TEST_CASE("outer rate step")
{
    CHECK(outer_rate_step(1e5, 1.0, 0.05) == doctest::Approx(1e5).epsilon(1e-14));
    CHECK(outer_rate_step(1e5, 0.0, 0.05) == doctest::Approx(1e5 * std::exp(0.05)).epsilon(1e-14));
    CHECK(outer_rate_step(1e5, 2.0, 0.05) < 1e5);
    // Projection keeps s >= 1 bit/s.
    CHECK(outer_rate_step(1.0, 50.0, 0.05) == 1.0);
    CHECK(outer_rate_step(1e5, std::numeric_limits<double>::infinity(), 0.05) == 1.0);
}

TEST_CASE("single link converges to the scalar optimum")
{
    for (double omega : {2.0, 5.0}) {
        const double G = 1e-11;
        const auto env = make_env({{G}}, {kN0});
        const auto res = run_distributed_pc(env, UtilityPcConfig{.omega = omega});
        const auto opt = oracle::single_link_optimum(G, kN0, env.bandwidth, omega);
        CHECK(res.state.rate[0] == doctest::Approx(opt.rate[0]).epsilon(1e-3));
        CHECK(res.state.power[0] == doctest::Approx(opt.power[0]).epsilon(1e-2));
        CHECK(res.objective.back() == doctest::Approx(opt.objective).epsilon(1e-4));
    }
}

TEST_CASE("symmetric two-link instance reaches the grid optimum")
{
    const double G = 3e-11, X = 3e-13;
    const auto env = make_env({{G, X}, {X, G}}, {kN0, kN0});
    UtilityPcConfig cfg;
    cfg.omega = 3.0;
    const auto res = run_distributed_pc(env, cfg);
    const auto grid = oracle::grid_search_optimum(to_inst(env), cfg.omega);
    CHECK(res.objective.back() >= grid.objective - 0.01 * std::abs(grid.objective));
    CHECK(res.state.rate[0] == doctest::Approx(res.state.rate[1]).epsilon(1e-9));
}

TEST_CASE("all-fixed group leaves powers untouched")
{
    const auto env = make_env({{1e-9, 1e-12}, {1e-12, 1e-9}}, {kN0, kN0});
    const std::vector<LinkControl> ctl{LinkControl::Fixed, LinkControl::Fixed};
    const std::vector<double> p{0.05, 0.07};
    const auto res = run_distributed_pc(env, UtilityPcConfig{}, ctl, p);
    CHECK(res.state.power == p);
    CHECK(res.objective.empty());
    CHECK(res.state.rate[0] == doctest::Approx(env.bandwidth * std::log2(1.0 + sinr(p, env, 0))));
    CHECK(res.state.lambda == std::vector<double>{0.0, 0.0});
}

TEST_CASE("mixed group: fixed link keeps its power, utility link adapts")
{
    const auto env = make_env({{1e-10, 1e-12}, {1e-12, 1e-10}}, {kN0, kN0});
    const std::vector<LinkControl> ctl{LinkControl::Fixed, LinkControl::Utility};
    const std::vector<double> p{0.05, 0.0};
    const auto res = run_distributed_pc(env, UtilityPcConfig{}, ctl, p);
    CHECK(res.state.power[0] == 0.05);
    CHECK(res.state.power[1] != UtilityPcConfig{}.init_power_w);
    // The utility link sees the fixed one as extra noise: compare with the
    // scalar optimum at that effective noise.
    const double noise_eff = kN0 + 1e-12 * 0.05;
    const auto opt = oracle::single_link_optimum(1e-10, noise_eff, env.bandwidth, 1.0);
    CHECK(res.state.rate[1] == doctest::Approx(opt.rate[0]).epsilon(1e-3));
}

TEST_CASE("targets follow rates and the cap holds")
{
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const auto r = d2d::testing::random_instance(rng, 4, 0.5);
        auto env = to_env(r.inst);
        env.cap_gain = {1e-10, 0.0, 3e-11, 1e-9};
        UtilityPcConfig cfg;
        cfg.i_star_w = 50.0 * kN0;
        std::ostringstream trace;
        const std::vector<LinkControl> ctl(4, LinkControl::Utility);
        const std::vector<double> fixed(4, 0.0);
        const auto res = run_distributed_pc(env, cfg, ctl, fixed, &trace);
        for (std::size_t l = 0; l < 4; ++l) {
            CHECK(res.state.gamma_tgt[l] == rate_to_sinr_target(res.state.rate[l], env.bandwidth));
            CHECK(res.state.power[l] >= cfg.p_min_w * (1 - 1e-12));
            CHECK(res.state.power[l] <= cfg.p_max_w);
            if (env.cap_gain[l] > 0.0)
                CHECK(res.state.power[l] * env.cap_gain[l] <= *cfg.i_star_w + 1e-12);
        }
        // Every traced power respects the cap as well.
        std::istringstream in(trace.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "iter,link,P,s,gamma,lambda,mu");
        int rows = 0;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string f;
            std::vector<double> v;
            while (std::getline(row, f, ','))
                v.push_back(std::stod(f));
            const auto l = static_cast<std::size_t>(v[1]);
            if (env.cap_gain[l] > 0.0)
                CHECK(v[2] * env.cap_gain[l] <= *cfg.i_star_w + 1e-12);
            CHECK(v[4] == doctest::Approx(rate_to_sinr_target(v[3], env.bandwidth)).epsilon(1e-12));
            ++rows;
        }
        CHECK(rows == cfg.outer_iters * 4);
    }
}

TEST_CASE("hopeless link is flagged as clamped")
{
    // Very weak direct gain next to a strong interferer: the target it keeps
    // chasing needs more than p_max.
    const auto env = make_env({{1e-16, 1e-9}, {1e-14, 1e-9}}, {kN0, kN0});
    UtilityPcConfig cfg;
    cfg.omega = 0.01;
    const auto res = run_distributed_pc(env, cfg);
    CHECK(res.clamped[0]);
    CHECK_FALSE(res.clamped[1]);
}

TEST_CASE("invalid inputs")
{
    UtilityPcConfig cfg;
    cfg.omega = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = UtilityPcConfig{};
    cfg.p_min_w = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    LinkEnvironment env;
    CHECK_THROWS_AS(run_distributed_pc(env, UtilityPcConfig{}), InvariantError);
    auto bad = make_env({{0.0}}, {kN0});
    CHECK_THROWS_AS(run_distributed_pc(bad, UtilityPcConfig{}), InvariantError);
}
