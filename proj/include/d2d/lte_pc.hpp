#pragma once

#include <optional>

namespace d2d::lte {

enum class Scheme { NPC, FST, OFPC, CL };

const char* to_string(Scheme s);

/// LTE uplink power-control parameters. All powers in dBm, targets in dB.
struct LtePcConfig {
    Scheme scheme = Scheme::OFPC;
    double alpha = 0.8;
    std::optional<double> gamma_tgt_db = 15.0;
    double p_in_dbm = -116.0;
    double p_max_dbm = 23.010299956639813;   // 200 mW
    double p_min_dbm = -23.010299956639813;  // 5e-6 W
    double fixed_power_dbm = 23.010299956639813;
    int m_rbs = 1;

    /// Path-loss compensation factor actually applied: FST and CL fully
    /// invert the path loss, OFPC uses `alpha`.
    double effective_alpha() const { return scheme == Scheme::OFPC ? alpha : 1.0; }
    void validate() const;
    bool operator==(const LtePcConfig&) const = default;
};

/// P0 = a * (gamma_tgt + P_IN) + (1 - a) * (P_MAX - 10 log10 M).
/// Throws ConfigError when no SNR target is configured or for NPC.
double compute_p0(const LtePcConfig& cfg);

/// Open-loop transmit power in dBm for a path gain `gain_to_rx_db` (negative
/// dB). The transport-format and TPC offsets are zero here.
double open_loop_power(const LtePcConfig& cfg, double gain_to_rx_db);

/// Magnitude of the closed-loop TPC step in dB: half the SINR error when it
/// exceeds 2 dB, otherwise 1 dB.
double tpc_step(double gamma_tgt_db, double gamma_meas_db);

struct ClLoopState {
    double power_dbm = 0.0;
    double last_sinr_db = 0.0;
};

/// Moves the power one TPC step toward the target, clamped to
/// [p_min, p_max]. No change when the measurement equals the target.
ClLoopState closed_loop_update(const ClLoopState& state, double gamma_tgt_db, double gamma_meas_db, const LtePcConfig& cfg);

} // namespace d2d::lte
