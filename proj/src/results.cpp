#include "d2d/results.hpp"

#include "d2d/config.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace d2d::cli {

using nlohmann::json;

OutputFormat parse_format(std::string_view s)
{
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "json")
        return OutputFormat::Json;
    if (s == "both")
        return OutputFormat::Both;
    throw ConfigError("format", "expected csv, json or both, got '" + std::string(s) + "'");
}

void write_samples_csv(const sim::ExperimentResult& result, std::ostream& out)
{
    out << "class,measure,sample\n";
    char buf[64];
    for (const auto& [cls, measures] : result.samples())
        for (const auto& [measure, values] : measures)
            for (double v : values) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << cls << ',' << measure << ',' << buf << '\n';
            }
}

json summary_json(const sim::ExperimentResult& result)
{
    static constexpr int kPercentiles[] = {5, 10, 25, 50, 75, 90, 95};
    json classes = json::object();
    for (const auto& [cls, measures] : result.samples())
        for (const auto& [measure, values] : measures) {
            if (values.empty())
                continue;
            const auto cdf = sim::compute_cdf(values);
            json pct = json::object();
            for (int p : kPercentiles)
                pct[std::to_string(p)] = cdf.percentile(p / 100.0);
            classes[cls][measure] = {{"count", cdf.size()},
                                     {"mean", cdf.mean()},
                                     {"min", cdf.percentile(0.0)},
                                     {"max", cdf.percentile(1.0)},
                                     {"percentiles", pct}};
        }
    return {{"num_drops", result.drops.size()},
            {"mean_sum_rate_bps", result.mean_sum_rate_bps()},
            {"mean_sum_power_w", result.mean_sum_power_w()},
            {"classes", classes}};
}

namespace {

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class WriteFn>
void write_file(const std::filesystem::path& path, WriteFn&& fn)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    fn(out);
    out.flush();
    if (!out)
        throw std::runtime_error("write to " + path.string() + " failed");
}

} // namespace

std::vector<std::filesystem::path> emit_results(const sim::ExperimentResult& result, OutputFormat format,
                                                const std::filesystem::path& dir, const std::string& label)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    if (format != OutputFormat::Json) {
        const auto p = dir / "samples.csv";
        write_file(p, [&](std::ostream& o) { write_samples_csv(result, o); });
        written.push_back(p);
    }
    if (format != OutputFormat::Csv) {
        const auto p = dir / "summary.json";
        auto s = summary_json(result);
        if (!label.empty())
            s["label"] = label;
        write_file(p, [&](std::ostream& o) { o << s.dump(2) << '\n'; });
        written.push_back(p);
    }

    json outputs = json::array();
    for (const auto& p : written)
        outputs.push_back(p.filename().string());
    json manifest = {{"tool", kToolName},
                     {"tool_version", kToolVersion},
                     {"label", label},
                     {"seed", result.config.seed},
                     {"timestamp", utc_timestamp()},
                     {"outputs", outputs},
                     {"config", config_to_json(result.config)}};
    const auto mp = dir / "manifest.json";
    write_file(mp, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    written.push_back(mp);
    return written;
}

} // namespace d2d::cli
