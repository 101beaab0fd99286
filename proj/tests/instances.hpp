#pragma once

// Random power-control instances shared by the unit and acceptance tests.

#include "d2d/oracle.hpp"
#include "d2d/utility_pc.hpp"

#include <random>
#include <vector>

namespace d2d::testing {

struct RandomInstance {
    oracle::Instance inst;
    std::vector<double> gamma;   // SINR targets
    double radius = 0.0;         // of diag(gamma) F
};

inline utility::LinkEnvironment to_env(const oracle::Instance& inst)
{
    utility::LinkEnvironment env;
    env.gain = inst.gain;
    env.noise = inst.noise;
    env.bandwidth = inst.bandwidth;
    return env;
}

/// Gains in the range seen by the simulator (direct 1e-11..1e-7, cross two to
/// five decades weaker), noise around -114 dBm, and targets rescaled so that
/// the normalized gain matrix has the requested spectral radius.
inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t n, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RandomInstance r;
    r.inst.gain = SquareMatrix(n);
    r.inst.noise.resize(n);
    r.inst.bandwidth = 625e3;
    for (std::size_t l = 0; l < n; ++l) {
        const double direct = std::pow(10.0, -11.0 + 4.0 * u(rng));
        for (std::size_t m = 0; m < n; ++m)
            r.inst.gain(l, m) = m == l ? direct : direct * std::pow(10.0, -2.0 - 3.0 * u(rng));
        r.inst.noise[l] = dbm_to_watts(-114.0 + 2.0 * (u(rng) - 0.5));
    }
    r.gamma.resize(n);
    for (auto& g : r.gamma)
        g = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const double base = oracle::spectral_radius(oracle::normalized_gain(r.gamma, r.inst));
    for (auto& g : r.gamma)
        g *= radius / base;
    r.radius = oracle::spectral_radius(oracle::normalized_gain(r.gamma, r.inst));
    return r;
}

/// Unclamped configuration so that the inner iterations follow the pure
/// fixed-point map.
inline utility::UtilityPcConfig unclamped_config()
{
    utility::UtilityPcConfig cfg;
    cfg.p_min_w = 1e-300;
    cfg.p_max_w = 1e300;
    return cfg;
}

/// Synchronous power iteration using the library's inner step.
inline std::vector<double> iterate_power(const utility::LinkEnvironment& env, std::span<const double> gamma, int steps,
                                         double p0 = 0.01)
{
    const auto cfg = unclamped_config();
    std::vector<double> p(env.size(), p0), next(env.size());
    for (int t = 0; t < steps; ++t) {
        for (std::size_t l = 0; l < p.size(); ++l)
            next[l] = utility::inner_power_step(p[l], gamma[l], utility::sinr(p, env, l), cfg);
        p.swap(next);
    }
    return p;
}

/// Synchronous reverse-link iteration using the library's mu step.
inline std::vector<double> iterate_mu(const utility::LinkEnvironment& env, std::span<const double> gamma, int steps,
                                      double mu0 = 0.01)
{
    std::vector<double> mu(env.size(), mu0), next(env.size());
    for (int t = 0; t < steps; ++t) {
        for (std::size_t l = 0; l < mu.size(); ++l)
            next[l] = utility::mu_step(mu[l], gamma[l], utility::gamma_cc(mu, env, l));
        mu.swap(next);
    }
    return mu;
}

inline double max_rel_err(std::span<const double> a, std::span<const double> b)
{
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max(e, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return e;
}

} // namespace d2d::testing
