#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "ncrsim/metrics.hpp"

namespace ncrsim {

/// Creates `dir` if needed and checks a file can be written there.
/// Throws SimError otherwise.
void preflight_output_dir(const std::filesystem::path& dir);

void write_sinr_samples(std::ostream& os, const MetricsStore& store);
void write_throughput(std::ostream& os, const MetricsStore& store);
void write_mcs_usage(std::ostream& os, const MetricsStore& store);
std::string summary_json(const MetricsStore& store);

/// Writes sinr_samples.csv, throughput.csv, mcs_usage.csv and summary.json.
void emit(const MetricsStore& store, const std::filesystem::path& dir);

}  // namespace ncrsim
