#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace toriclab {

// Grid scan over one target operation. Every output row carries
// (experiment id, grid index, sample index, seed) so any row can be replayed
// in isolation; the whole CSV is byte-identical under replay.
struct ScanConfig {
    std::string experiment_id;
    std::string target; // "stopo" | "eab" | "pin"
    std::vector<std::pair<std::string, std::vector<double>>> grid; // ordered axes
    int n_samples = 1;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::map<std::string, std::string> options; // target-specific knobs
    int threads = 1;
};

ScanConfig scan_config_from_json(const std::string& text);

struct ScanResult {
    std::string csv_path;
    std::string manifest_path;
    long long rows_written = 0;
    long long failures = 0;
    bool resumed = false;
};

// Runs the scan, flushing after every grid point; an existing CSV with a
// matching header is resumed at grid-point granularity.
ScanResult run_scan(const ScanConfig& cfg);

} // namespace toriclab
