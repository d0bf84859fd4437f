#include "lczmap/synthcity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lczmap/rng.hpp"
#include "lczmap/textio.hpp"

namespace lczmap {

namespace {

constexpr int kBuilding = 5;
constexpr int kRoad = 6;
constexpr int kPervious = 1;
constexpr int kUnused = 8;  // feeds no surface fraction

double central_draw(const Interval& iv, std::mt19937_64& rng) {
    double lo = iv.lo;
    double hi = iv.hi;
    if (!std::isfinite(hi)) hi = lo + 20.0;
    const double w = hi - lo;
    return uniform(rng, lo + 0.25 * w, hi - 0.25 * w);
}

}  // namespace

ParamVector sample_target_params(int lcz, const ThresholdTable& table, std::mt19937_64& rng) {
    const auto& row = table.row(lcz);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        ParamVector p;
        p.bsf = central_draw(row[0], rng);
        p.isf = central_draw(row[1], rng);
        p.psf = central_draw(row[2], rng);
        p.hre = central_draw(row[3], rng);
        if (p.bsf + p.isf + p.psf <= 1.0) return p;
    }
    fail("class " + std::to_string(lcz) + ": central target region has no feasible draws");
}

PatchResult gen_patch(const PatchSpec& spec, double cellsize, int patch_pixels) {
    const int n = patch_pixels;
    if (n < 1) fail("patch_pixels must be >= 1");
    if (!spec.target.hre) fail("patch spec needs a target HRE (the building height)");
    const double sf_sum = spec.target.bsf + spec.target.isf + spec.target.psf;
    if (sf_sum > 1.0) fail("infeasible targets: surface fractions sum to " + fmt_double(sf_sum));

    const long long total = static_cast<long long>(n) * n;
    long long n_b = std::llround(spec.target.bsf * static_cast<double>(total));
    long long n_i = std::llround(spec.target.isf * static_cast<double>(total));
    long long n_p = std::llround(spec.target.psf * static_cast<double>(total));
    if (n_b + n_i + n_p > total) n_p = total - n_b - n_i;  // rounding spill
    if (n_p < 0) {
        n_i += n_p;
        n_p = 0;
    }

    GridHeader h;
    h.ncols = n;
    h.nrows = n;
    h.xll = 0.0;
    h.yll = 0.0;
    h.cellsize = cellsize;
    h.nodata = -9999.0;
    CategoryRaster mask(h, kUnused);

    // Building blocks on a slot grid, top-left of each slot, one pixel of
    // street left between neighbors when the quota allows.
    if (n_b > 0) {
        const int s = std::min(20, n);
        const int m = std::max(1, n / s);
        const long long per_slot = (n_b + static_cast<long long>(m) * m - 1) / (static_cast<long long>(m) * m);
        int b = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(per_slot))));
        b = std::clamp(b, 1, s);
        long long remaining = n_b;
        for (int sr = 0; sr < m && remaining > 0; ++sr) {
            for (int sc = 0; sc < m && remaining > 0; ++sc) {
                const long long a = std::min<long long>(remaining, static_cast<long long>(b) * b);
                const int r0 = sr * s;
                const int c0 = sc * s;
                const int full_rows = static_cast<int>(a / b);
                const int rest = static_cast<int>(a % b);
                for (int rr = 0; rr < full_rows; ++rr)
                    for (int cc = 0; cc < b; ++cc) mask.codes[(r0 + rr) * n + (c0 + cc)] = kBuilding;
                for (int cc = 0; cc < rest; ++cc)
                    mask.codes[(r0 + full_rows) * n + (c0 + cc)] = kBuilding;
                remaining -= a;
            }
        }
        for (long long i = 0; i < total && remaining > 0; ++i) {
            if (mask.codes[i] != kBuilding) {
                mask.codes[i] = kBuilding;
                --remaining;
            }
        }
    }

    auto scan_fill = [&](int code, long long count) {
        for (long long i = 0; i < static_cast<long long>(mask.codes.size()) && count > 0; ++i) {
            if (mask.codes[i] == kUnused) {
                mask.codes[i] = code;
                --count;
            }
        }
    };
    scan_fill(kRoad, n_i);
    scan_fill(kPervious, n_p);

    Raster elev(h, 0.0);
    const double height = *spec.target.hre;
    if (spec.mixed_heights) {
        std::vector<std::size_t> bpix;
        for (std::size_t i = 0; i < mask.codes.size(); ++i)
            if (mask.codes[i] == kBuilding) bpix.push_back(i);
        const std::size_t half = bpix.size() / 2;
        for (std::size_t k = 0; k < bpix.size(); ++k)
            elev.values[bpix[k]] = k < half ? height / 1.25 : height * 1.25;
    } else {
        for (std::size_t i = 0; i < mask.codes.size(); ++i)
            if (mask.codes[i] == kBuilding) elev.values[i] = height;
    }

    PatchWindow w{0, 0, n, 0, 0};
    PatchResult out{std::move(mask), std::move(elev), {}};
    out.achieved = compute_params(out.mask, out.elev, w, gt_index_sets());
    return out;
}

SceneSpec make_scene_spec(const ThresholdTable& table, const std::string& table_name,
                          const std::vector<int>& classes, int per_class, std::uint64_t seed,
                          double cellsize, int patch_pixels) {
    if (classes.empty()) fail("scene needs at least one class");
    if (per_class < 1) fail("per-class patch count must be >= 1");
    SceneSpec spec;
    spec.cellsize = cellsize;
    spec.patch_pixels = patch_pixels;
    spec.seed = seed;
    spec.table_name = table_name;
    for (std::size_t r = 0; r < classes.size(); ++r) {
        std::vector<PatchSpec> row;
        for (int c = 0; c < per_class; ++c) {
            PatchSpec p;
            p.lcz = classes[r];
            p.seed = derive_seed(seed, r * static_cast<std::uint64_t>(per_class) + c);
            std::mt19937_64 rng(p.seed);
            p.target = sample_target_params(p.lcz, table, rng);
            row.push_back(p);
        }
        spec.grid.push_back(std::move(row));
    }
    return spec;
}

Scene gen_scene(const SceneSpec& spec) {
    if (spec.grid.empty() || spec.grid.front().empty()) fail("scene grid is empty");
    const std::size_t cols = spec.grid.front().size();
    for (const auto& row : spec.grid)
        if (row.size() != cols) fail("scene grid must be rectangular");
    const int n = spec.patch_pixels;

    GridHeader h;
    h.ncols = static_cast<int>(cols) * n;
    h.nrows = static_cast<int>(spec.grid.size()) * n;
    h.xll = 0.0;
    h.yll = 0.0;
    h.cellsize = spec.cellsize;
    h.nodata = -9999.0;

    Scene scene;
    scene.spec = spec;
    scene.mask = CategoryRaster(h, kUnused);
    scene.elev = Raster(h, 0.0);
    for (std::size_t pr = 0; pr < spec.grid.size(); ++pr) {
        for (std::size_t pc = 0; pc < cols; ++pc) {
            const PatchSpec& ps = spec.grid[pr][pc];
            PatchResult res = gen_patch(ps, spec.cellsize, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    const std::size_t dst =
                        (pr * n + r) * static_cast<std::size_t>(h.ncols) + pc * n + c;
                    scene.mask.codes[dst] = res.mask.codes[r * n + c];
                    scene.elev.values[dst] = res.elev.values[r * n + c];
                }
            }
            PatchWindow w{static_cast<int>(pr) * n, static_cast<int>(pc) * n, n,
                          static_cast<int>(pr), static_cast<int>(pc)};
            scene.labels.emplace_back(patch_id(w), ps.lcz);
            scene.achieved.push_back(res.achieved);
        }
    }
    return scene;
}

void write_scene(const Scene& scene, const std::string& dir) {
    write_ascii_grid(scene.mask, dir + "/mask.asc");
    write_ascii_grid(scene.elev, dir + "/elev.asc");
    write_labels_csv(scene.labels, dir + "/labels.csv");

    nlohmann::json j;
    j["generator"] = "mt19937_64";
    j["seed"] = scene.spec.seed;
    j["table"] = scene.spec.table_name;
    j["cellsize"] = scene.spec.cellsize;
    j["patch_pixels"] = scene.spec.patch_pixels;
    nlohmann::json patches = nlohmann::json::array();
    std::size_t k = 0;
    const std::size_t cols = scene.spec.grid.front().size();
    for (std::size_t pr = 0; pr < scene.spec.grid.size(); ++pr) {
        for (std::size_t pc = 0; pc < cols; ++pc, ++k) {
            const PatchSpec& ps = scene.spec.grid[pr][pc];
            const ParamVector& a = scene.achieved[k];
            nlohmann::json e;
            e["id"] = scene.labels[k].first;
            e["lcz"] = ps.lcz;
            e["seed"] = ps.seed;
            e["target"] = {{"bsf", ps.target.bsf},
                           {"isf", ps.target.isf},
                           {"psf", ps.target.psf},
                           {"hre", ps.target.hre ? nlohmann::json(*ps.target.hre)
                                                 : nlohmann::json()}};
            e["achieved"] = {{"bsf", a.bsf},
                             {"isf", a.isf},
                             {"psf", a.psf},
                             {"hre", a.hre ? nlohmann::json(*a.hre) : nlohmann::json()}};
            patches.push_back(std::move(e));
        }
    }
    j["patches"] = std::move(patches);
    std::ofstream out(dir + "/scene.json", std::ios::binary);
    if (!out) fail("cannot open '" + dir + "/scene.json' for writing");
    out << j.dump(2) << '\n';
    if (!out) fail("error writing '" + dir + "/scene.json'");
}

std::vector<Point3> gen_pointcloud(const Raster& elev, double density, std::uint64_t seed,
                                   double jitter_sigma) {
    if (!(density > 0.0)) fail("point density must be > 0");
    const GridHeader& h = elev.header;
    const double per_cell = density * h.cellsize * h.cellsize;
    const long long base = static_cast<long long>(per_cell);
    const double frac = per_cell - static_cast<double>(base);

    std::mt19937_64 rng(seed);
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(per_cell * elev.values.size() * 1.05) + 16);
    for (int r = 0; r < h.nrows; ++r) {
        for (int c = 0; c < h.ncols; ++c) {
            if (elev.is_nodata(r, c)) continue;
            const double z0 = elev.at(r, c);
            long long count = base;
            if (frac > 0.0 && uniform01(rng) < frac) ++count;
            for (long long k = 0; k < count; ++k) {
                Point3 p;
                p.x = h.xll + (c + uniform01(rng)) * h.cellsize;
                p.y = h.yll + (h.nrows - r - 1 + uniform01(rng)) * h.cellsize;
                p.z = z0 + (jitter_sigma > 0.0 ? jitter_sigma * gaussian(rng) : 0.0);
                pts.push_back(p);
            }
        }
    }
    return pts;
}

}  // namespace lczmap
