#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lczmap {

// Shared knobs across subcommands. Flags override config-file values, which
// override these defaults.
struct PipelineConfig {
    double cellsize = 0.5;        // meters per cell
    double radius = 0.75;         // sliding-circle radius, meters
    int patch_pixels = 200;       // patch side length in cells
    double min_valid = 0.8;       // minimum non-NODATA fraction per patch
    std::string scheme = "gt";    // gt | noisy
    std::string thresholds = "table1";  // table1 | table2 | fitted | CSV path
    std::uint64_t seed = 42;
    int threads = 1;
};

void validate_config(const PipelineConfig& cfg);
PipelineConfig load_pipeline_config(const std::string& path);
void write_config_json(const PipelineConfig& cfg, const std::string& path);

// Runs one subcommand; args exclude the program name. Returns 0 on success,
// 1 on input/usage errors, 2 on internal errors.
int run_cli(std::vector<std::string> args);

}  // namespace lczmap
