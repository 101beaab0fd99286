#pragma once

#include "d2d/common.hpp"
#include "d2d/topology.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace d2d::utility {

struct UtilityPcConfig {
    double omega = 1.0;          ///< weight of the sum-power cost
    double epsilon = 0.05;       ///< outer-loop gradient step
    int outer_iters = 100;
    int inner_iters = 10;
    double init_power_w = 0.01;
    double init_gamma_tgt = 0.2; ///< linear
    double init_mu = 0.01;
    double p_max_w = 0.2;
    double p_min_w = 5e-6;
    std::optional<double> i_star_w; ///< interference cap at the serving BS (hybrid scheme)
    double inner_tolerance = 1e-8;  ///< relative change that ends an inner loop early

    void validate() const;
    bool operator==(const UtilityPcConfig&) const = default;
};

/// Gains, noise and bandwidth seen by the links of one co-channel group.
/// gain(l, m) is the gain from transmitter m to receiver l. cap_gain[l] is
/// the gain from transmitter l to its serving BS when the I* cap applies to
/// l (D2D links in direct mode), zero otherwise.
struct LinkEnvironment {
    SquareMatrix gain;
    std::vector<double> noise;
    double bandwidth = 1.0;
    std::vector<double> cap_gain;

    std::size_t size() const { return noise.size(); }
    void validate() const;

    static LinkEnvironment from_group(const CochannelGroup& group);
};

enum class LinkControl { Utility, Fixed };

/// Per-link state of the distributed algorithm. Powers in W, rates in
/// bit/s. Entries of externally powered (Fixed) links carry their achieved
/// rate and SINR but zero dual variables.
struct PcState {
    std::vector<double> power;
    std::vector<double> rate;
    std::vector<double> gamma_tgt;
    std::vector<double> lambda;
    std::vector<double> lambda_lp;
    std::vector<double> mu;
};

struct PcResult {
    PcState state;
    std::vector<double> sinr;        ///< achieved with the final joint power vector
    std::vector<bool> clamped;       ///< at p_max during every inner step of the last cycle
    std::vector<double> objective;   ///< sum ln s - omega sum P after each inner loop
};

/// gamma_l = G_ll P_l / (sigma_l + sum_{m != l} G_lm P_m).
double sinr(std::span<const double> power, const LinkEnvironment& env, std::size_t l);
std::vector<double> sinr_all(std::span<const double> power, const LinkEnvironment& env);

/// SINR from the total received power (noise included) at receiver l.
/// Throws std::domain_error when total <= G_ll P_l.
double sinr_from_total(double total_rx_power, double p_l, double g_ll);

/// gamma_tgt = 2^(s / W) - 1.
double rate_to_sinr_target(double rate, double bandwidth);

/// Zander step (gamma_tgt / gamma) * P, clamped to [p_min, p_max] and then,
/// when cap_gain > 0 and I* is set, to I* / cap_gain.
double inner_power_step(double power, double gamma_tgt, double gamma_meas, const UtilityPcConfig& cfg, double cap_gain = 0.0);

/// Upper bound from the hybrid interference cap, +inf when it does not apply.
double power_cap(const UtilityPcConfig& cfg, double cap_gain);

/// Reverse-link SINR: mu_l G_ll / (sigma_l + sum_{k != l} G_kl (sigma_l / sigma_k) mu_k).
double gamma_cc(std::span<const double> mu, const LinkEnvironment& env, std::size_t l);

/// mu_l' = (gamma_tgt / gamma_cc) mu_l.
double mu_step(double mu, double gamma_tgt, double gamma_cc_value);

/// LP dual variables omega mu_l / eta_l with eta_l = gamma_tgt_l sigma_l / G_ll.
std::vector<double> recover_lambda_lp(std::span<const double> mu, const LinkEnvironment& env, std::span<const double> gamma_tgt, double omega);

/// ln(1 + g) (1 + g) / g, with its limit 1 at g = 0. This is the derivative of
/// the SINR target with respect to the log-rate, divided by the target.
double lambda_prefactor(double gamma_tgt);

/// Multipliers of the log-domain power problem:
/// lambda_l = ln(1+g)(1+g)/g * P_l * lambda_lp_l.
std::vector<double> recover_lambda(std::span<const double> power, std::span<const double> gamma_tgt, std::span<const double> lambda_lp);

/// Log-domain projected gradient step for u = ln:
/// s' = s exp(eps (1 - lambda)), projected onto s >= 1 (log-rate >= 0).
double outer_rate_step(double rate, double lambda, double epsilon);

/// sum ln s_l - omega sum P_l over the given links.
double utility_objective(std::span<const double> rate, std::span<const double> power, double omega);

/// Runs the outer/inner loop machinery on one co-channel group. Links marked
/// Fixed keep `fixed_power[l]` and only contribute interference. When
/// `trace` is non-null, one CSV row (iter,link,P,s,gamma,lambda,mu) per
/// utility link and outer iteration is written to it.
PcResult run_distributed_pc(const LinkEnvironment& env, const UtilityPcConfig& cfg, std::span<const LinkControl> control,
                            std::span<const double> fixed_power, std::ostream* trace = nullptr);

/// Convenience overload: every link utility-controlled.
PcResult run_distributed_pc(const LinkEnvironment& env, const UtilityPcConfig& cfg);

} // namespace d2d::utility
