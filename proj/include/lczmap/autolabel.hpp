#pragma once

#include <string>

#include "lczmap/lczparams.hpp"
#include "lczmap/pointcloud.hpp"

namespace lczmap {

// Noisy 4-category land-cover scheme derived from LiDAR statistics.
namespace noisy {
constexpr int background = 0;
constexpr int trees = 1;
constexpr int buildings = 2;
constexpr int roads = 3;
}  // namespace noisy

// Heuristic thresholds for the per-cell labeling rules, in meters. All are
// exposed in the JSON rule config since no canonical values exist.
struct LabelRuleConfig {
    double building_min_height = 3.0;
    double building_max_std = 1.5;
    double tree_min_height = 2.0;
    double tree_min_std = 1.5;
    double road_max_height = 0.5;
    double road_max_std = 0.3;
    int min_count = 1;
};

LabelRuleConfig load_label_rules(const std::string& path);

// Per-cell rules, first match wins: buildings (tall, low spread), trees
// (tall, high spread), roads (flat, very low spread), else background. Cells
// with too few points or NODATA statistics become background.
CategoryRaster derive_noisy_mask(const Raster& mean, const Raster& std_dev, const Raster& count,
                                 const LabelRuleConfig& cfg);
CategoryRaster derive_noisy_mask(const StatsStack& stats, const LabelRuleConfig& cfg);

// Index sets for the noisy scheme: BSF counts buildings, ISF roads, PSF
// background plus trees (a partition of all four codes).
ClassIndexSets noisy_index_sets();

}  // namespace lczmap
