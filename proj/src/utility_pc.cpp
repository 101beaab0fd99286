#include "d2d/utility_pc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace d2d::utility {

namespace {

constexpr double kMuFloor = 1e-300;
constexpr double kMuCeil = 1e300;

} // namespace

void UtilityPcConfig::validate() const
{
    if (!(omega > 0.0))
        throw ConfigError("utility.omega", "must be > 0");
    if (!(epsilon > 0.0))
        throw ConfigError("utility.epsilon", "must be > 0");
    if (outer_iters < 1)
        throw ConfigError("utility.outer_iters", "must be >= 1");
    if (inner_iters < 1)
        throw ConfigError("utility.inner_iters", "must be >= 1");
    if (!(init_power_w > 0.0))
        throw ConfigError("utility.init_power_w", "must be > 0");
    if (!(init_gamma_tgt > 0.0))
        throw ConfigError("utility.init_gamma_tgt", "must be > 0");
    if (!(init_mu > 0.0))
        throw ConfigError("utility.init_mu", "must be > 0");
    if (!(p_min_w > 0.0))
        throw ConfigError("utility.p_min_w", "must be > 0");
    if (!(p_min_w < p_max_w))
        throw ConfigError("utility.p_max_w", "must exceed utility.p_min_w");
    if (i_star_w && !(*i_star_w > 0.0))
        throw ConfigError("utility.i_star_w", "must be > 0 when set");
    if (!(inner_tolerance >= 0.0))
        throw ConfigError("utility.inner_tolerance", "must be >= 0");
}

void LinkEnvironment::validate() const
{
    const std::size_t n = noise.size();
    if (gain.size() != n)
        throw InvariantError("gain matrix does not match the number of links");
    if (!cap_gain.empty() && cap_gain.size() != n)
        throw InvariantError("cap gain vector does not match the number of links");
    for (std::size_t l = 0; l < n; ++l) {
        if (!(gain(l, l) > 0.0))
            throw InvariantError("direct gain must be positive");
        if (!(noise[l] > 0.0))
            throw InvariantError("noise must be positive");
    }
    if (!(bandwidth > 0.0))
        throw InvariantError("bandwidth must be positive");
}

LinkEnvironment LinkEnvironment::from_group(const CochannelGroup& group)
{
    LinkEnvironment env;
    env.gain = group.gain;
    env.noise = group.noise;
    env.bandwidth = group.bandwidth;
    env.cap_gain.assign(group.size(), 0.0);
    for (std::size_t i = 0; i < group.size(); ++i)
        if (group.modes[i] == Mode::Direct)
            env.cap_gain[i] = group.gain_to_serving_bs[i];
    return env;
}

double sinr(std::span<const double> power, const LinkEnvironment& env, std::size_t l)
{
    double interference = env.noise[l];
    for (std::size_t m = 0; m < power.size(); ++m)
        if (m != l)
            interference += env.gain(l, m) * power[m];
    return env.gain(l, l) * power[l] / interference;
}

std::vector<double> sinr_all(std::span<const double> power, const LinkEnvironment& env)
{
    std::vector<double> out(power.size());
    for (std::size_t l = 0; l < power.size(); ++l)
        out[l] = sinr(power, env, l);
    return out;
}

double sinr_from_total(double total_rx_power, double p_l, double g_ll)
{
    const double wanted = g_ll * p_l;
    const double rest = total_rx_power - wanted;
    if (!(rest > 0.0))
        throw std::domain_error("sinr_from_total: total received power must exceed the useful signal");
    return wanted / rest;
}

double rate_to_sinr_target(double rate, double bandwidth) { return std::exp2(rate / bandwidth) - 1.0; }

double power_cap(const UtilityPcConfig& cfg, double cap_gain)
{
    if (!cfg.i_star_w || !(cap_gain > 0.0))
        return std::numeric_limits<double>::infinity();
    return *cfg.i_star_w / cap_gain;
}

double inner_power_step(double power, double gamma_tgt, double gamma_meas, const UtilityPcConfig& cfg, double cap_gain)
{
    const double next = std::clamp(gamma_tgt / gamma_meas * power, cfg.p_min_w, cfg.p_max_w);
    return std::min(next, power_cap(cfg, cap_gain));
}

double gamma_cc(std::span<const double> mu, const LinkEnvironment& env, std::size_t l)
{
    double denom = env.noise[l];
    for (std::size_t k = 0; k < mu.size(); ++k)
        if (k != l)
            denom += env.gain(k, l) * (env.noise[l] / env.noise[k]) * mu[k];
    return mu[l] * env.gain(l, l) / denom;
}

double mu_step(double mu, double gamma_tgt, double gamma_cc_value) { return gamma_tgt / gamma_cc_value * mu; }

std::vector<double> recover_lambda_lp(std::span<const double> mu, const LinkEnvironment& env, std::span<const double> gamma_tgt, double omega)
{
    std::vector<double> out(mu.size());
    for (std::size_t l = 0; l < mu.size(); ++l) {
        // eta_l -> 0 as the target vanishes; keep the ratio finite.
        const double g = std::max(gamma_tgt[l], std::numeric_limits<double>::min());
        out[l] = omega * mu[l] * env.gain(l, l) / (g * env.noise[l]);
    }
    return out;
}

double lambda_prefactor(double gamma_tgt)
{
    if (gamma_tgt < 1e-8)
        return 1.0 + 0.5 * gamma_tgt; // series of ln(1+g)(1+g)/g
    return std::log1p(gamma_tgt) * (1.0 + gamma_tgt) / gamma_tgt;
}

std::vector<double> recover_lambda(std::span<const double> power, std::span<const double> gamma_tgt, std::span<const double> lambda_lp)
{
    std::vector<double> out(power.size());
    for (std::size_t l = 0; l < power.size(); ++l)
        out[l] = lambda_prefactor(gamma_tgt[l]) * power[l] * lambda_lp[l];
    return out;
}

double outer_rate_step(double rate, double lambda, double epsilon)
{
    // d/ds~ [ln(e^s~)] = 1, so the gradient in the log-rate is 1 - lambda.
    const double grad = std::isfinite(lambda) ? 1.0 - lambda : -std::numeric_limits<double>::infinity();
    const double log_rate = std::max(0.0, std::log(rate) + epsilon * grad);
    return std::exp(log_rate);
}

double utility_objective(std::span<const double> rate, std::span<const double> power, double omega)
{
    double v = 0.0;
    for (std::size_t l = 0; l < rate.size(); ++l)
        v += std::log(rate[l]) - omega * power[l];
    return v;
}

PcResult run_distributed_pc(const LinkEnvironment& env, const UtilityPcConfig& cfg, std::span<const LinkControl> control,
                            std::span<const double> fixed_power, std::ostream* trace)
{
    env.validate();
    cfg.validate();
    const std::size_t n = env.size();
    if (n == 0)
        throw InvariantError("run_distributed_pc: empty group");
    if (control.size() != n || fixed_power.size() != n)
        throw InvariantError("run_distributed_pc: per-link vectors do not match the group size");

    auto cap_of = [&](std::size_t l) { return env.cap_gain.empty() ? 0.0 : env.cap_gain[l]; };

    std::vector<std::size_t> util; // indices of utility-controlled links
    std::vector<double> p(n);
    for (std::size_t l = 0; l < n; ++l) {
        if (control[l] == LinkControl::Utility) {
            util.push_back(l);
            p[l] = std::min(std::clamp(cfg.init_power_w, cfg.p_min_w, cfg.p_max_w), power_cap(cfg, cap_of(l)));
        } else {
            p[l] = fixed_power[l];
        }
    }

    PcResult res;
    res.clamped.assign(n, false);
    const std::size_t u = util.size();

    // The reverse-link problem lives on the utility links only; power from
    // fixed links is folded into their noise since it never changes here.
    LinkEnvironment sub;
    sub.gain = SquareMatrix(u);
    sub.noise.resize(u);
    sub.bandwidth = env.bandwidth;
    for (std::size_t a = 0; a < u; ++a) {
        double noise = env.noise[util[a]];
        for (std::size_t m = 0; m < n; ++m)
            if (control[m] == LinkControl::Fixed)
                noise += env.gain(util[a], m) * p[m];
        sub.noise[a] = noise;
        for (std::size_t b = 0; b < u; ++b)
            sub.gain(a, b) = env.gain(util[a], util[b]);
    }

    std::vector<double> s(u, cfg.init_gamma_tgt > 0.0 ? env.bandwidth * std::log2(1.0 + cfg.init_gamma_tgt) : 1.0);
    std::vector<double> gtgt(u, cfg.init_gamma_tgt);
    std::vector<double> mu(u, cfg.init_mu);
    std::vector<double> lambda(u, 0.0), lambda_lp(u, 0.0);
    std::vector<double> p_next(n), mu_next(u), p_sub(u);
    std::vector<bool> at_max(u);

    if (trace)
        *trace << std::setprecision(17) << "iter,link,P,s,gamma,lambda,mu\n";

    for (int k = 0; k < (u ? cfg.outer_iters : 0); ++k) {
        for (std::size_t a = 0; a < u; ++a)
            gtgt[a] = rate_to_sinr_target(s[a], env.bandwidth);

        std::fill(at_max.begin(), at_max.end(), true);
        for (int t = 0; t < cfg.inner_iters; ++t) {
            double change = 0.0;
            p_next = p;
            for (std::size_t a = 0; a < u; ++a) {
                const std::size_t l = util[a];
                const double measured = sinr(p, env, l);
                p_next[l] = inner_power_step(p[l], gtgt[a], measured, cfg, cap_of(l));
                if (p_next[l] < cfg.p_max_w)
                    at_max[a] = false;
                change = std::max(change, std::abs(p_next[l] - p[l]) / p[l]);

                double m = mu_step(mu[a], gtgt[a], gamma_cc(mu, sub, a));
                if (!(m <= kMuCeil))
                    m = kMuCeil;
                mu_next[a] = std::max(m, kMuFloor);
                change = std::max(change, std::abs(mu_next[a] - mu[a]) / mu[a]);
            }
            p.swap(p_next);
            mu.swap(mu_next);
            if (change < cfg.inner_tolerance)
                break;
        }

        for (std::size_t a = 0; a < u; ++a)
            p_sub[a] = p[util[a]];
        lambda_lp = recover_lambda_lp(mu, sub, gtgt, cfg.omega);
        lambda = recover_lambda(p_sub, gtgt, lambda_lp);
        res.objective.push_back(utility_objective(s, p_sub, cfg.omega));

        if (trace)
            for (std::size_t a = 0; a < u; ++a)
                *trace << k << ',' << util[a] << ',' << p_sub[a] << ',' << s[a] << ',' << gtgt[a] << ',' << lambda[a] << ','
                       << mu[a] << '\n';

        for (std::size_t a = 0; a < u; ++a) {
            s[a] = outer_rate_step(s[a], lambda[a], cfg.epsilon);
            gtgt[a] = rate_to_sinr_target(s[a], env.bandwidth);
        }
    }

    res.sinr = sinr_all(p, env);
    PcState& st = res.state;
    st.power = p;
    st.rate.resize(n);
    st.gamma_tgt.assign(n, 0.0);
    st.lambda.assign(n, 0.0);
    st.lambda_lp.assign(n, 0.0);
    st.mu.assign(n, 0.0);
    for (std::size_t l = 0; l < n; ++l)
        st.rate[l] = env.bandwidth * std::log2(1.0 + res.sinr[l]);
    for (std::size_t a = 0; a < u; ++a) {
        const std::size_t l = util[a];
        st.rate[l] = s[a];
        st.gamma_tgt[l] = gtgt[a];
        st.lambda[l] = lambda[a];
        st.lambda_lp[l] = lambda_lp[a];
        st.mu[l] = mu[a];
        res.clamped[l] = at_max[a];
    }
    return res;
}

PcResult run_distributed_pc(const LinkEnvironment& env, const UtilityPcConfig& cfg)
{
    const std::vector<LinkControl> control(env.size(), LinkControl::Utility);
    const std::vector<double> fixed(env.size(), 0.0);
    return run_distributed_pc(env, cfg, control, fixed);
}

} // namespace d2d::utility
