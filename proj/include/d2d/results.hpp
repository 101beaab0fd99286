#pragma once

#include "d2d/sim.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace d2d::cli {

enum class OutputFormat { Csv, Json, Both };

/// Parses "csv", "json" or "both"; throws ConfigError("format", ...) otherwise.
OutputFormat parse_format(std::string_view s);

/// Rows of `class,measure,sample`, one per sample, printed with %.17g.
void write_samples_csv(const sim::ExperimentResult& result, std::ostream& out);

/// Per class and measure: count, mean, min, max and percentiles 5..95, plus
/// the mean sum rate and mean sum power over drops.
nlohmann::json summary_json(const sim::ExperimentResult& result);

/// Writes samples.csv and/or summary.json plus manifest.json into `dir`
/// (created if missing). Returns the written paths. Throws std::runtime_error
/// on I/O failure.
std::vector<std::filesystem::path> emit_results(const sim::ExperimentResult& result, OutputFormat format,
                                                const std::filesystem::path& dir, const std::string& label = "");

} // namespace d2d::cli
