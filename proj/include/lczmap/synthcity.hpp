#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lczmap/lczrules.hpp"
#include "lczmap/pointcloud.hpp"

namespace lczmap {

// One synthetic patch: a planted class plus the parameter vector its pixels
// should realize.
struct PatchSpec {
    int lcz = 0;
    ParamVector target;          // hre doubles as the building height
    std::uint64_t seed = 0;
    bool mixed_heights = false;  // two building heights instead of one
};

struct SceneSpec {
    std::vector<std::vector<PatchSpec>> grid;  // [row][col], rectangular
    double cellsize = 0.5;
    int patch_pixels = 200;
    std::uint64_t seed = 0;       // base seed the patch seeds derive from
    std::string table_name = "custom";
};

// Uniform draw from the central 50% of each of the class's intervals,
// resampled until BSF+ISF+PSF <= 1. A half-infinite HRE interval [lo, inf)
// stands in for [lo, lo+20] before taking the central half.
ParamVector sample_target_params(int lcz, const ThresholdTable& table, std::mt19937_64& rng);

struct PatchResult {
    CategoryRaster mask;    // ground-truth categories (buildings 5, roads 6,
                            // pervious 1, remainder 8)
    Raster elev;            // building height on building pixels, 0 elsewhere
    ParamVector achieved;   // measured back from the rasters
};

// Deterministic given the spec: building blocks on a slot grid hit the BSF
// pixel count exactly, roads and pervious pixels are scan-filled to theirs.
PatchResult gen_patch(const PatchSpec& spec, double cellsize = 0.5, int patch_pixels = 200);

struct Scene {
    SceneSpec spec;
    CategoryRaster mask;
    Raster elev;
    LabelRows labels;                   // row-major patch order
    std::vector<ParamVector> achieved;  // same order
};

// classes x per_class layout (one class per grid row), per-patch seeds and
// targets derived from spec_seed.
SceneSpec make_scene_spec(const ThresholdTable& table, const std::string& table_name,
                          const std::vector<int>& classes, int per_class, std::uint64_t seed,
                          double cellsize = 0.5, int patch_pixels = 200);

Scene gen_scene(const SceneSpec& spec);

// Writes mask.asc, elev.asc, labels.csv and scene.json (specs, achieved
// parameters, and the generator identity) into an existing directory.
void write_scene(const Scene& scene, const std::string& dir);

// Uniform scatter per cell at the cell elevation plus Gaussian jitter;
// expected count = density * covered area. NODATA cells emit nothing.
std::vector<Point3> gen_pointcloud(const Raster& elev, double density, std::uint64_t seed,
                                   double jitter_sigma = 0.05);

}  // namespace lczmap
