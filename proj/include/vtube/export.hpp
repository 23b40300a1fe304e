#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "vtube/simulation.hpp"

namespace vtube {

/// Writes states.csv, tensions.csv, distances.csv, lyapunov.csv and nodes.csv
/// into `out_dir` (created if missing), keeping every `stride`-th sample plus
/// the last one. Numbers use 9 significant digits. Throws IoError.
std::vector<std::filesystem::path> export_csv(const RunRecord& record,
                                              const std::filesystem::path& out_dir,
                                              std::size_t stride = 1);

/// key = value lines for a summary.
std::string format_summary(const RunSummary& summary, const RunRecord& record);

/// Writes summary.txt into `out_dir`. Throws IoError.
std::filesystem::path write_summary(const RunSummary& summary, const RunRecord& record,
                                    const std::filesystem::path& out_dir);

std::string format_number(double v);

}  // namespace vtube
