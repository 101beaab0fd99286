#include "d2d/config.hpp"

#include <fstream>
#include <limits>
#include <set>

namespace d2d::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

/// Walks one JSON object, rejecting keys nobody asked for.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ConfigError(path_, "expected a JSON object");
    }

    ~Reader() noexcept(false)
    {
        if (std::uncaught_exceptions() > 0)
            return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(join(path_, it.key()), "unknown key");
    }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number())
                throw ConfigError(join(path_, key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                throw ConfigError(join(path_, key), "must be finite");
        }
    }

    void integer(const std::string& key, int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer())
                throw ConfigError(join(path_, key), "expected an integer");
            const auto x = v->get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError(join(path_, key), "integer out of range");
            out = static_cast<int>(x);
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number())
                throw ConfigError(join(path_, key), "expected a number or null");
            out = v->get<double>();
        }
    }

    template <class Enum, std::size_t N>
    void enumeration(const std::string& key, Enum& out, const std::pair<const char*, Enum> (&names)[N])
    {
        if (const json* v = find(key)) {
            if (!v->is_string())
                throw ConfigError(join(path_, key), "expected a string");
            const auto s = v->get<std::string>();
            std::string allowed;
            for (const auto& [name, value] : names) {
                if (s == name) {
                    out = value;
                    return;
                }
                allowed += std::string(allowed.empty() ? "" : ", ") + name;
            }
            throw ConfigError(join(path_, key), "unknown value '" + s + "' (expected one of: " + allowed + ")");
        }
    }

    std::string sub(const std::string& key) const { return join(path_, key); }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

constexpr std::pair<const char*, ra::Scheme> kRaNames[] = {
    {"MinInterf", ra::Scheme::MinInterf}, {"BRA", ra::Scheme::BRA}, {"CPA", ra::Scheme::CPA}};
constexpr std::pair<const char*, ModePolicy> kPolicyNames[] = {
    {"ForcedCellular", ModePolicy::ForcedCellular}, {"ForcedD2D", ModePolicy::ForcedD2D}, {"Adaptive", ModePolicy::Adaptive}};
constexpr std::pair<const char*, sim::CellularPc> kCellPcNames[] = {
    {"OFPC", sim::CellularPc::OFPC}, {"UtilityMax", sim::CellularPc::UtilityMax}};
constexpr std::pair<const char*, sim::D2dPc> kD2dPcNames[] = {{"NPC", sim::D2dPc::NPC},
                                                              {"FST", sim::D2dPc::FST},
                                                              {"OFPC", sim::D2dPc::OFPC},
                                                              {"CL", sim::D2dPc::CL},
                                                              {"UtilityMax", sim::D2dPc::UtilityMax}};

void read_geometry(const json& j, GeometryConfig& g)
{
    Reader r(j, "geometry");
    r.integer("num_cells", g.num_cells);
    r.number("cell_radius", g.cell_radius);
    r.integer("ues_per_cell", g.ues_per_cell);
    r.integer("d2d_pairs_per_cell", g.d2d_pairs_per_cell);
    if (const json* v = r.find("d2d_distance_range")) {
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
            throw ConfigError("geometry.d2d_distance_range", "expected [min, max] in meters");
        g.d2d_distance_min = (*v)[0].get<double>();
        g.d2d_distance_max = (*v)[1].get<double>();
    }
    r.integer("num_rbs", g.num_rbs);
    r.number("system_bandwidth", g.system_bandwidth);
    r.number("carrier_frequency", g.carrier_frequency);
}

void read_channel(const json& j, ChannelConfig& c)
{
    Reader r(j, "channel");
    r.number("gain_at_1m_db", c.gain_at_1m_db);
    r.number("pathloss_exponent", c.pathloss_exponent);
    r.number("shadowing_stddev_db", c.shadowing_stddev_db);
    r.number("noise_power_dbm", c.noise_power_dbm);
}

void read_lte(const json& j, lte::LtePcConfig& c, int& cl_iterations)
{
    Reader r(j, "lte");
    r.number("alpha", c.alpha);
    r.optional_number("gamma_tgt_db", c.gamma_tgt_db);
    r.number("p_in_dbm", c.p_in_dbm);
    r.number("p_max_dbm", c.p_max_dbm);
    r.number("p_min_dbm", c.p_min_dbm);
    r.number("fixed_power_dbm", c.fixed_power_dbm);
    r.integer("m_rbs", c.m_rbs);
    r.integer("cl_iterations", cl_iterations);
}

void read_utility(const json& j, utility::UtilityPcConfig& c)
{
    Reader r(j, "utility");
    r.number("omega", c.omega);
    r.number("epsilon", c.epsilon);
    r.integer("outer_iters", c.outer_iters);
    r.integer("inner_iters", c.inner_iters);
    r.number("init_power_w", c.init_power_w);
    r.number("init_gamma_tgt", c.init_gamma_tgt);
    r.number("init_mu", c.init_mu);
    r.number("p_max_w", c.p_max_w);
    r.number("p_min_w", c.p_min_w);
    r.optional_number("i_star_w", c.i_star_w);
    r.number("inner_tolerance", c.inner_tolerance);
}

template <class Enum, std::size_t N>
const char* name_of(Enum v, const std::pair<const char*, Enum> (&names)[N])
{
    for (const auto& [name, value] : names)
        if (value == v)
            return name;
    return "?";
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

sim::ExperimentConfig config_from_json(const json& j)
{
    sim::ExperimentConfig cfg;
    {
        Reader r(j, "");
        if (const json* v = r.find("geometry"))
            read_geometry(*v, cfg.geometry);
        if (const json* v = r.find("channel"))
            read_channel(*v, cfg.channel);
        if (const json* v = r.find("lte"))
            read_lte(*v, cfg.lte, cfg.cl_iterations);
        if (const json* v = r.find("utility"))
            read_utility(*v, cfg.utility);
        r.enumeration("ra_scheme", cfg.ra_scheme, kRaNames);
        r.enumeration("mode_policy", cfg.mode_policy, kPolicyNames);
        r.enumeration("cellular_pc", cfg.cellular_pc, kCellPcNames);
        r.enumeration("d2d_pc", cfg.d2d_pc, kD2dPcNames);
        r.integer("num_drops", cfg.num_drops);
        if (const json* v = r.find("seed")) {
            if (!v->is_number_unsigned())
                throw ConfigError("seed", "expected a non-negative integer");
            cfg.seed = v->get<std::uint64_t>();
        }
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const sim::ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    const auto& c = cfg.channel;
    const auto& l = cfg.lte;
    const auto& u = cfg.utility;
    return json{
        {"geometry",
         {{"num_cells", g.num_cells},
          {"cell_radius", g.cell_radius},
          {"ues_per_cell", g.ues_per_cell},
          {"d2d_pairs_per_cell", g.d2d_pairs_per_cell},
          {"d2d_distance_range", {g.d2d_distance_min, g.d2d_distance_max}},
          {"num_rbs", g.num_rbs},
          {"system_bandwidth", g.system_bandwidth},
          {"carrier_frequency", g.carrier_frequency}}},
        {"channel",
         {{"gain_at_1m_db", c.gain_at_1m_db},
          {"pathloss_exponent", c.pathloss_exponent},
          {"shadowing_stddev_db", c.shadowing_stddev_db},
          {"noise_power_dbm", c.noise_power_dbm}}},
        {"lte",
         {{"alpha", l.alpha},
          {"gamma_tgt_db", optional_to_json(l.gamma_tgt_db)},
          {"p_in_dbm", l.p_in_dbm},
          {"p_max_dbm", l.p_max_dbm},
          {"p_min_dbm", l.p_min_dbm},
          {"fixed_power_dbm", l.fixed_power_dbm},
          {"m_rbs", l.m_rbs},
          {"cl_iterations", cfg.cl_iterations}}},
        {"utility",
         {{"omega", u.omega},
          {"epsilon", u.epsilon},
          {"outer_iters", u.outer_iters},
          {"inner_iters", u.inner_iters},
          {"init_power_w", u.init_power_w},
          {"init_gamma_tgt", u.init_gamma_tgt},
          {"init_mu", u.init_mu},
          {"p_max_w", u.p_max_w},
          {"p_min_w", u.p_min_w},
          {"i_star_w", optional_to_json(u.i_star_w)},
          {"inner_tolerance", u.inner_tolerance}}},
        {"ra_scheme", name_of(cfg.ra_scheme, kRaNames)},
        {"mode_policy", name_of(cfg.mode_policy, kPolicyNames)},
        {"cellular_pc", name_of(cfg.cellular_pc, kCellPcNames)},
        {"d2d_pc", name_of(cfg.d2d_pc, kD2dPcNames)},
        {"num_drops", cfg.num_drops},
        {"seed", cfg.seed},
    };
}

sim::ExperimentConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("tool_version") && j.contains("config"))
        return config_from_json(j.at("config"));
    return config_from_json(j);
}

std::vector<std::string> preset_names()
{
    return {"fig5-utilitypc-ra-compare", "fig6-ltepc-ra-compare", "fig7-cellular-power-sinr", "fig8-d2d-power-sinr",
            "fig9-hybrid-tradeoff",      "fig10-gains-lte",       "fig11-gains-utility"};
}

namespace {

sim::ExperimentConfig all_utility(double omega)
{
    sim::ExperimentConfig c;
    c.cellular_pc = sim::CellularPc::UtilityMax;
    c.d2d_pc = sim::D2dPc::UtilityMax;
    c.utility.omega = omega;
    return c;
}

sim::ExperimentConfig hybrid(double omega, double i_star_over_n0)
{
    sim::ExperimentConfig c;
    c.cellular_pc = sim::CellularPc::OFPC;
    c.d2d_pc = sim::D2dPc::UtilityMax;
    c.utility.omega = omega;
    c.utility.i_star_w = i_star_over_n0 * c.channel.noise_watts();
    return c;
}

std::string omega_label(double w)
{
    if (w == 0.01)
        return "0.01";
    if (w == 0.1)
        return "0.1";
    return std::to_string(static_cast<int>(w));
}

void hybrid_pair(std::vector<NamedRun>& runs)
{
    runs.push_back({"hybrid-w1-istar0.02N0", hybrid(1.0, 0.02)});
    runs.push_back({"hybrid-w1-istar500N0", hybrid(1.0, 500.0)});
}

std::vector<NamedRun> mode_gain_sweep(const sim::ExperimentConfig& base)
{
    std::vector<NamedRun> runs;
    auto ue_mode = base;
    ue_mode.mode_policy = ModePolicy::ForcedCellular;
    ue_mode.geometry.d2d_pairs_per_cell = 2;
    auto ms = base;
    ms.mode_policy = ModePolicy::Adaptive;
    ms.geometry.d2d_pairs_per_cell = 2;
    auto ms_reuse = base;
    ms_reuse.mode_policy = ModePolicy::Adaptive;
    runs.push_back({"ue-mode", ue_mode});
    runs.push_back({"ms", ms});
    runs.push_back({"ms-reuse", ms_reuse});
    return runs;
}

} // namespace

std::vector<NamedRun> preset(std::string_view name)
{
    std::vector<NamedRun> runs;
    const ra::Scheme ra_sweep[] = {ra::Scheme::MinInterf, ra::Scheme::CPA, ra::Scheme::BRA};

    if (name == "fig5-utilitypc-ra-compare") {
        for (auto s : ra_sweep) {
            auto c = all_utility(1.0);
            c.ra_scheme = s;
            runs.push_back({std::string("utility-") + ra::to_string(s), c});
        }
    } else if (name == "fig6-ltepc-ra-compare") {
        for (auto s : ra_sweep) {
            sim::ExperimentConfig c;
            c.ra_scheme = s;
            runs.push_back({std::string("lte-") + ra::to_string(s), c});
        }
    } else if (name == "fig7-cellular-power-sinr") {
        runs.push_back({"lte-ofpc", sim::ExperimentConfig{}});
        for (double w : {0.01, 1.0, 10.0})
            runs.push_back({"utility-w" + omega_label(w), all_utility(w)});
        hybrid_pair(runs);
    } else if (name == "fig8-d2d-power-sinr") {
        for (auto d : {sim::D2dPc::NPC, sim::D2dPc::FST, sim::D2dPc::OFPC, sim::D2dPc::CL}) {
            sim::ExperimentConfig c;
            c.d2d_pc = d;
            runs.push_back({std::string("lte-d2d-") + sim::to_string(d), c});
        }
        for (double w : {0.01, 1.0, 10.0})
            runs.push_back({"utility-w" + omega_label(w), all_utility(w)});
        hybrid_pair(runs);
    } else if (name == "fig9-hybrid-tradeoff") {
        hybrid_pair(runs);
    } else if (name == "fig10-gains-lte") {
        runs = mode_gain_sweep(sim::ExperimentConfig{});
    } else if (name == "fig11-gains-utility") {
        runs = mode_gain_sweep(all_utility(1.0));
    } else {
        std::string list;
        for (const auto& n : preset_names())
            list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (available: " + list + ")");
    }
    for (auto& r : runs)
        r.config.validate();
    return runs;
}

} // namespace d2d::cli
