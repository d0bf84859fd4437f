#include "lczmap/report.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lczmap/geogrid.hpp"
#include "lczmap/textio.hpp"

namespace lczmap {

const RGB& LCZPalette::color_for(const std::optional<int>& lcz) const {
    if (!lcz) return unclassified;
    auto it = colors.find(*lcz);
    if (it == colors.end()) fail("no palette color for LCZ " + std::to_string(*lcz));
    return it->second;
}

LCZPalette default_palette() {
    // The WUDAPT convention for the ten built types.
    LCZPalette p;
    p.colors[1] = {0x8c, 0x00, 0x00};
    p.colors[2] = {0xd1, 0x00, 0x00};
    p.colors[3] = {0xff, 0x00, 0x00};
    p.colors[4] = {0xbf, 0x4d, 0x00};
    p.colors[5] = {0xff, 0x66, 0x00};
    p.colors[6] = {0xff, 0x99, 0x55};
    p.colors[7] = {0xfa, 0xee, 0x05};
    p.colors[8] = {0xbc, 0xbc, 0xbc};
    p.colors[9] = {0xff, 0xcc, 0xaa};
    p.colors[10] = {0x55, 0x55, 0x55};
    return p;
}

PredictionGrid build_prediction_grid(const std::vector<Prediction>& preds) {
    if (preds.empty()) fail("no predictions to arrange");
    int max_r = 0, max_c = 0;
    for (const auto& p : preds) {
        int pr, pc;
        if (!parse_patch_id(p.patch_id, pr, pc))
            fail("patch id '" + p.patch_id + "' is not of the form r<row>c<col>");
        max_r = std::max(max_r, pr);
        max_c = std::max(max_c, pc);
    }
    PredictionGrid grid(max_r + 1, std::vector<std::optional<int>>(max_c + 1));
    for (const auto& p : preds) {
        int pr, pc;
        parse_patch_id(p.patch_id, pr, pc);
        grid[pr][pc] = p.single;
    }
    return grid;
}

ImageRGB render_lcz_map(const PredictionGrid& grid, const LCZPalette& palette, int scale) {
    if (grid.empty() || grid.front().empty()) fail("prediction grid is empty");
    if (scale < 1) fail("render scale must be >= 1");
    const std::size_t cols = grid.front().size();
    for (const auto& row : grid)
        if (row.size() != cols) fail("prediction grid must be rectangular");

    ImageRGB img(static_cast<int>(cols) * scale, static_cast<int>(grid.size()) * scale);
    for (std::size_t r = 0; r < grid.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const RGB& rgb = palette.color_for(grid[r][c]);
            for (int dy = 0; dy < scale; ++dy) {
                std::uint8_t* px = img.at(static_cast<int>(c) * scale,
                                          static_cast<int>(r) * scale + dy);
                for (int dx = 0; dx < scale; ++dx) {
                    *px++ = rgb.r;
                    *px++ = rgb.g;
                    *px++ = rgb.b;
                }
            }
        }
    }
    return img;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
    return buf;
}

void write_report(const AccuracyReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    if (format == ReportFormat::csv) {
        out << "class,n,accuracy_pct\n";
        for (const auto& row : report.per_class)
            out << "LCZ " << row.lcz << ',' << fmt_int(row.n) << ','
                << format_percent(row.accuracy) << '\n';
        out << "All (OA)," << fmt_int(report.n_total) << ',' << format_percent(report.oa)
            << '\n';
    } else {
        auto pct = [](double fraction) {
            double v = 0.0;
            parse_double(format_percent(fraction), v);
            return v;
        };
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : report.per_class) {
            nlohmann::json e;
            e["class"] = "LCZ " + std::to_string(row.lcz);
            e["n"] = row.n;
            e["accuracy_pct"] = pct(row.accuracy);
            rows.push_back(std::move(e));
        }
        nlohmann::json all;
        all["class"] = "All (OA)";
        all["n"] = report.n_total;
        all["accuracy_pct"] = pct(report.oa);
        rows.push_back(std::move(all));
        nlohmann::json j;
        j["rows"] = std::move(rows);
        out << j.dump(2) << '\n';
    }
    if (!out) fail("error writing '" + path + "'");
}

}  // namespace lczmap
