#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lczmap/geogrid.hpp"

namespace lczmap {

// Which land-cover codes feed each surface fraction, plus the single code
// whose pixels carry building heights.
struct ClassIndexSets {
    std::set<int> bsf_codes;
    std::set<int> isf_codes;
    std::set<int> psf_codes;
    int building_code = 0;
};

// Ground-truth NYC 8-category scheme: buildings {5}, impervious {6,7},
// pervious {1,2,3}; categories 4 and 8 feed no fraction.
ClassIndexSets gt_index_sets();

struct ParamVector {
    double bsf = 0.0;
    double isf = 0.0;
    double psf = 0.0;
    std::optional<double> hre;  // meters; missing when the patch has no building pixels
};

struct PatchSample {
    std::string patch_id;
    PatchWindow window;
    ParamVector params;
    std::optional<int> lcz;      // label in {1..10} when present
    double valid_fraction = 0.0; // fraction of non-NODATA mask pixels
};

// Fraction of window pixels whose code is in `codes`. NODATA pixels never
// match; the denominator is always size*size.
double surface_fraction(const CategoryRaster& mask, const PatchWindow& w,
                        const std::set<int>& codes);

// Geometric mean of elevation over building pixels, with heights floored at
// hre_log_floor() before the log. Missing when no building pixel has a valid
// elevation.
std::optional<double> height_of_roughness_elements(const CategoryRaster& mask, const Raster& elev,
                                                   const PatchWindow& w, int building_code);

constexpr double hre_log_floor() { return 0.01; }  // meters

ParamVector compute_params(const CategoryRaster& mask, const Raster& elev, const PatchWindow& w,
                           const ClassIndexSets& sets);

struct DatasetExtract {
    std::vector<PatchSample> samples;         // row-major window order
    std::vector<std::string> skipped_low_valid;
};

// Tiles the mask into patch_pixels^2 windows, keeps those with
// valid_fraction >= min_valid, and attaches labels when given. Labels that
// reference ids outside the tiling are an error.
DatasetExtract extract_dataset(const CategoryRaster& mask, const Raster& elev,
                               const ClassIndexSets& sets,
                               const std::map<std::string, int>* labels,
                               int patch_pixels = 200, double min_valid = 0.8,
                               int threads = 1);

// Parameter dump CSV: patch_id,bsf,isf,psf,hre,lcz,valid_fraction with hre
// and lcz empty when missing. Row order is preserved.
void write_params_csv(const std::vector<PatchSample>& samples, const std::string& path);
std::vector<PatchSample> read_params_csv(const std::string& path);

// Labels CSV: header patch_id,lcz, one row per labeled patch.
using LabelRows = std::vector<std::pair<std::string, int>>;
LabelRows read_labels_csv(const std::string& path);
void write_labels_csv(const LabelRows& rows, const std::string& path);
std::map<std::string, int> labels_to_map(const LabelRows& rows);

}  // namespace lczmap
