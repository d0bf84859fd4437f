#include "lczmap/lczparams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "lczmap/textio.hpp"

namespace lczmap {

ClassIndexSets gt_index_sets() {
    return ClassIndexSets{{5}, {6, 7}, {1, 2, 3}, 5};
}

namespace {

void check_window(const GridHeader& h, const PatchWindow& w) {
    if (w.size < 1) fail("empty patch window");
    if (w.row0 < 0 || w.col0 < 0 || w.row0 + w.size > h.nrows || w.col0 + w.size > h.ncols)
        fail("patch window exceeds grid extent");
}

}  // namespace

double surface_fraction(const CategoryRaster& mask, const PatchWindow& w,
                        const std::set<int>& codes) {
    check_window(mask.header, w);
    if (codes.empty()) fail("surface_fraction: empty code set");
    const int nodata = mask.nodata_code();
    long long hits = 0;
    for (int r = w.row0; r < w.row0 + w.size; ++r) {
        for (int c = w.col0; c < w.col0 + w.size; ++c) {
            const int code = mask.at(r, c);
            if (code != nodata && codes.count(code)) ++hits;
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(w.size) * static_cast<double>(w.size));
}

std::optional<double> height_of_roughness_elements(const CategoryRaster& mask, const Raster& elev,
                                                   const PatchWindow& w, int building_code) {
    if (!aligned(mask.header, elev.header)) fail("mask and elevation rasters are not aligned");
    check_window(mask.header, w);
    long long m = 0;
    double log_sum = 0.0, comp = 0.0;
    double mn = 0.0, mx = 0.0;
    for (int r = w.row0; r < w.row0 + w.size; ++r) {
        for (int c = w.col0; c < w.col0 + w.size; ++c) {
            if (mask.at(r, c) != building_code || elev.is_nodata(r, c)) continue;
            const double h = std::max(elev.at(r, c), hre_log_floor());
            if (m == 0) {
                mn = mx = h;
            } else {
                mn = std::min(mn, h);
                mx = std::max(mx, h);
            }
            ++m;
            const double y = std::log(h) - comp;
            const double t = log_sum + y;
            comp = (t - log_sum) - y;
            log_sum = t;
        }
    }
    if (m == 0) return std::nullopt;
    if (mn == mx) return mn;  // geometric mean of a constant, exact
    return std::exp(log_sum / static_cast<double>(m));
}

ParamVector compute_params(const CategoryRaster& mask, const Raster& elev, const PatchWindow& w,
                           const ClassIndexSets& sets) {
    ParamVector p;
    p.bsf = surface_fraction(mask, w, sets.bsf_codes);
    p.isf = surface_fraction(mask, w, sets.isf_codes);
    p.psf = surface_fraction(mask, w, sets.psf_codes);
    p.hre = height_of_roughness_elements(mask, elev, w, sets.building_code);
    return p;
}

DatasetExtract extract_dataset(const CategoryRaster& mask, const Raster& elev,
                               const ClassIndexSets& sets,
                               const std::map<std::string, int>* labels, int patch_pixels,
                               double min_valid, int threads) {
    if (!aligned(mask.header, elev.header)) fail("mask and elevation rasters are not aligned");
    const auto windows = tile_patches(mask.header, patch_pixels);

    if (labels) {
        std::set<std::string> known;
        for (const auto& w : windows) known.insert(patch_id(w));
        for (const auto& [id, lcz] : *labels) {
            if (!known.count(id)) fail("label references unknown patch id '" + id + "'");
            if (lcz < 1 || lcz > 10)
                fail("label for patch '" + id + "' outside LCZ range 1..10: " +
                     std::to_string(lcz));
        }
    }

    std::vector<PatchSample> all(windows.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PatchWindow& w = windows[i];
            PatchSample s;
            s.patch_id = patch_id(w);
            s.window = w;
            long long valid = 0;
            for (int r = w.row0; r < w.row0 + w.size; ++r)
                for (int c = w.col0; c < w.col0 + w.size; ++c)
                    if (!mask.is_nodata(r, c)) ++valid;
            s.valid_fraction = static_cast<double>(valid) /
                               (static_cast<double>(w.size) * static_cast<double>(w.size));
            s.params = compute_params(mask, elev, w, sets);
            if (labels) {
                auto it = labels->find(s.patch_id);
                if (it != labels->end()) s.lcz = it->second;
            }
            all[i] = std::move(s);
        }
    };

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(windows.size())));
    if (workers <= 1) {
        work(0, windows.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (windows.size() + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(windows.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }

    DatasetExtract out;
    for (auto& s : all) {
        if (s.valid_fraction >= min_valid)
            out.samples.push_back(std::move(s));
        else
            out.skipped_low_valid.push_back(s.patch_id);
    }
    return out;
}

void write_params_csv(const std::vector<PatchSample>& samples, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "patch_id,bsf,isf,psf,hre,lcz,valid_fraction\n";
    for (const auto& s : samples) {
        out << s.patch_id << ',' << fmt_double(s.params.bsf) << ',' << fmt_double(s.params.isf)
            << ',' << fmt_double(s.params.psf) << ',';
        if (s.params.hre) out << fmt_double(*s.params.hre);
        out << ',';
        if (s.lcz) out << fmt_int(*s.lcz);
        out << ',' << fmt_double(s.valid_fraction) << '\n';
    }
    if (!out) fail("error writing '" + path + "'");
}

std::vector<PatchSample> read_params_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) fail(path + ": empty params CSV");
    ++lineno;
    strip_cr(line);
    if (line != "patch_id,bsf,isf,psf,hre,lcz,valid_fraction")
        fail(path + ":1: unexpected params CSV header '" + line + "'");
    std::vector<PatchSample> out;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 7)
            fail(path + ":" + std::to_string(lineno) + ": expected 7 fields, got " +
                 std::to_string(f.size()));
        PatchSample s;
        s.patch_id = f[0];
        int prow = -1, pcol = -1;
        if (parse_patch_id(s.patch_id, prow, pcol)) {
            s.window.prow = prow;
            s.window.pcol = pcol;
        }
        double* dst[3] = {&s.params.bsf, &s.params.isf, &s.params.psf};
        for (int i = 0; i < 3; ++i)
            if (!parse_double(f[i + 1], *dst[i]))
                fail(path + ":" + std::to_string(lineno) + ": bad fraction '" + f[i + 1] + "'");
        if (!f[4].empty()) {
            double h;
            if (!parse_double(f[4], h))
                fail(path + ":" + std::to_string(lineno) + ": bad hre '" + f[4] + "'");
            s.params.hre = h;
        }
        if (!f[5].empty()) {
            long long z;
            if (!parse_int(f[5], z))
                fail(path + ":" + std::to_string(lineno) + ": bad lcz '" + f[5] + "'");
            s.lcz = static_cast<int>(z);
        }
        if (!parse_double(f[6], s.valid_fraction))
            fail(path + ":" + std::to_string(lineno) + ": bad valid_fraction '" + f[6] + "'");
        out.push_back(std::move(s));
    }
    return out;
}

LabelRows read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) fail(path + ": empty labels CSV");
    ++lineno;
    strip_cr(line);
    if (line != "patch_id,lcz") fail(path + ":1: unexpected labels CSV header '" + line + "'");
    LabelRows rows;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 2)
            fail(path + ":" + std::to_string(lineno) + ": expected 2 fields, got " +
                 std::to_string(f.size()));
        long long z;
        if (!parse_int(f[1], z))
            fail(path + ":" + std::to_string(lineno) + ": bad lcz '" + f[1] + "'");
        rows.emplace_back(f[0], static_cast<int>(z));
    }
    return rows;
}

void write_labels_csv(const LabelRows& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "patch_id,lcz\n";
    for (const auto& [id, z] : rows) out << id << ',' << fmt_int(z) << '\n';
    if (!out) fail("error writing '" + path + "'");
}

std::map<std::string, int> labels_to_map(const LabelRows& rows) {
    std::map<std::string, int> m;
    for (const auto& [id, z] : rows) m[id] = z;
    return m;
}

}  // namespace lczmap
