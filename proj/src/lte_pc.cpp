#include "d2d/lte_pc.hpp"

#include "d2d/common.hpp"

#include <algorithm>
#include <cmath>

namespace d2d::lte {

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::NPC: return "NPC";
    case Scheme::FST: return "FST";
    case Scheme::OFPC: return "OFPC";
    case Scheme::CL: return "CL";
    }
    return "?";
}

void LtePcConfig::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError("lte.alpha", "must lie in [0, 1]");
    if (!(p_min_dbm <= p_max_dbm))
        throw ConfigError("lte.p_min_dbm", "must not exceed lte.p_max_dbm");
    if (m_rbs != 1)
        throw ConfigError("lte.m_rbs", "only single-RB grants are supported");
    if (fixed_power_dbm > p_max_dbm)
        throw ConfigError("lte.fixed_power_dbm", "must not exceed lte.p_max_dbm");
    if (scheme != Scheme::NPC && !gamma_tgt_db)
        throw ConfigError("lte.gamma_tgt_db", "required for FST, OFPC and CL");
}

double compute_p0(const LtePcConfig& cfg)
{
    if (cfg.scheme == Scheme::NPC)
        throw ConfigError("lte.scheme", "P0 is undefined without an SNR target (NPC)");
    if (!cfg.gamma_tgt_db)
        throw ConfigError("lte.gamma_tgt_db", "required for FST, OFPC and CL");
    const double a = cfg.effective_alpha();
    return a * (*cfg.gamma_tgt_db + cfg.p_in_dbm) + (1.0 - a) * (cfg.p_max_dbm - 10.0 * std::log10(cfg.m_rbs));
}

double open_loop_power(const LtePcConfig& cfg, double gain_to_rx_db)
{
    if (cfg.scheme == Scheme::NPC)
        return std::min(cfg.fixed_power_dbm, cfg.p_max_dbm);
    const double p = compute_p0(cfg) - cfg.effective_alpha() * gain_to_rx_db + 10.0 * std::log10(cfg.m_rbs);
    return std::max(std::min(cfg.p_max_dbm, p), cfg.p_min_dbm);
}

double tpc_step(double gamma_tgt_db, double gamma_meas_db)
{
    const double err = std::abs(gamma_tgt_db - gamma_meas_db);
    return err > 2.0 ? err / 2.0 : 1.0;
}

ClLoopState closed_loop_update(const ClLoopState& state, double gamma_tgt_db, double gamma_meas_db, const LtePcConfig& cfg)
{
    const double diff = gamma_tgt_db - gamma_meas_db;
    const double dir = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    ClLoopState next;
    next.power_dbm = std::clamp(state.power_dbm + dir * tpc_step(gamma_tgt_db, gamma_meas_db), cfg.p_min_dbm, cfg.p_max_dbm);
    next.last_sinr_db = gamma_meas_db;
    return next;
}

} // namespace d2d::lte
