#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lczmap/lczrules.hpp"

namespace lczmap {

struct RGB {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const RGB&) const = default;
};

// LCZ class colors plus the gray used for unclassified patches. The default
// values are listed in the README so image goldens stay stable.
struct LCZPalette {
    std::map<int, RGB> colors;
    RGB unclassified{128, 128, 128};

    const RGB& color_for(const std::optional<int>& lcz) const;  // throws on unknown ids
};

LCZPalette default_palette();

// 8-bit RGB image, rows top-down.
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 * width * height

    ImageRGB() = default;
    ImageRGB(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {}
    std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

using PredictionGrid = std::vector<std::vector<std::optional<int>>>;  // [row][col]

// Arranges single-class predictions by their r<prow>c<pcol> ids; cells with
// no prediction stay unclassified.
PredictionGrid build_prediction_grid(const std::vector<Prediction>& preds);

// One scale x scale block per patch, colored by its class.
ImageRGB render_lcz_map(const PredictionGrid& grid, const LCZPalette& palette, int scale);

enum class ReportFormat { csv, json };

// Accuracy table in percent with two decimals: one row per class plus a
// final "All (OA)" row. Both formats carry the same numbers.
void write_report(const AccuracyReport& report, ReportFormat format, const std::string& path);

std::string format_percent(double fraction);  // 0.5911 -> "59.11"

}  // namespace lczmap
