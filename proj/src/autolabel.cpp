#include "lczmap/autolabel.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace lczmap {

LabelRuleConfig load_label_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) fail(path + ": rule config must be a JSON object");

    LabelRuleConfig cfg;
    auto get_num = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) fail(path + ": '" + key + "' must be a number");
        dst = j[key].get<double>();
        if (dst < 0.0) fail(path + ": '" + key + "' must be >= 0");
    };
    get_num("building_min_height", cfg.building_min_height);
    get_num("building_max_std", cfg.building_max_std);
    get_num("tree_min_height", cfg.tree_min_height);
    get_num("tree_min_std", cfg.tree_min_std);
    get_num("road_max_height", cfg.road_max_height);
    get_num("road_max_std", cfg.road_max_std);
    if (j.contains("min_count")) {
        if (!j["min_count"].is_number_integer())
            fail(path + ": 'min_count' must be an integer");
        cfg.min_count = j["min_count"].get<int>();
        if (cfg.min_count < 0) fail(path + ": 'min_count' must be >= 0");
    }
    static const char* known[] = {"building_min_height", "building_max_std", "tree_min_height",
                                  "tree_min_std",        "road_max_height",  "road_max_std",
                                  "min_count"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) fail(path + ": unknown rule config key '" + it.key() + "'");
    }
    return cfg;
}

CategoryRaster derive_noisy_mask(const Raster& mean, const Raster& std_dev, const Raster& count,
                                 const LabelRuleConfig& cfg) {
    if (!aligned(mean.header, std_dev.header) || !aligned(mean.header, count.header))
        fail("statistics rasters are not aligned");

    GridHeader h = mean.header;
    h.nodata = -9999.0;  // output carries no NODATA cells; unlabeled = background
    CategoryRaster mask(h, noisy::background);
    for (int r = 0; r < mean.rows(); ++r) {
        for (int c = 0; c < mean.cols(); ++c) {
            if (count.at(r, c) < cfg.min_count) continue;
            if (mean.is_nodata(r, c) || std_dev.is_nodata(r, c)) continue;
            const double m = mean.at(r, c);
            const double s = std_dev.at(r, c);
            if (m >= cfg.building_min_height && s <= cfg.building_max_std)
                mask.at(r, c) = noisy::buildings;
            else if (m >= cfg.tree_min_height && s >= cfg.tree_min_std)
                mask.at(r, c) = noisy::trees;
            else if (m <= cfg.road_max_height && s <= cfg.road_max_std)
                mask.at(r, c) = noisy::roads;
        }
    }
    return mask;
}

CategoryRaster derive_noisy_mask(const StatsStack& stats, const LabelRuleConfig& cfg) {
    return derive_noisy_mask(stats.mean, stats.std, stats.count, cfg);
}

ClassIndexSets noisy_index_sets() {
    return ClassIndexSets{{noisy::buildings}, {noisy::roads},
                          {noisy::background, noisy::trees}, noisy::buildings};
}

}  // namespace lczmap
