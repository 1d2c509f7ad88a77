#pragma once

#include <filesystem>
#include <ostream>

namespace hyfleet::cli {

// Reads summary.csv (and net_summary.csv if present) from a sweep directory
// and prints per-drone-count tables plus prioritization effects.
void write_report(const std::filesystem::path& dir, std::ostream& out);

}  // namespace hyfleet::cli
