#include "lczmap/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "lczmap/textio.hpp"

namespace lczmap {

std::vector<Point3> read_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::vector<Point3> points;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto fields = split(std::string(stripped), ',');
        if (fields.size() != 3)
            fail(path + ":" + std::to_string(lineno) + ": expected 3 fields 'x,y,z', got " +
                 std::to_string(fields.size()));
        Point3 p;
        double* dst[3] = {&p.x, &p.y, &p.z};
        for (int i = 0; i < 3; ++i) {
            if (!parse_double(trim(fields[i]), *dst[i]) || !std::isfinite(*dst[i]))
                fail(path + ":" + std::to_string(lineno) + ": non-numeric field '" + fields[i] +
                     "'");
        }
        points.push_back(p);
    }
    return points;
}

void write_xyz(const std::vector<Point3>& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    for (const auto& p : points)
        out << fmt_double(p.x) << ',' << fmt_double(p.y) << ',' << fmt_double(p.z) << '\n';
    if (!out) fail("error writing '" + path + "'");
}

namespace {

// Per-cell partial sums. Kahan-compensated so that accumulation order changes
// (point permutations) stay below the 1e-9 tolerance on mean/std.
struct CellAcc {
    long long n = 0;
    double sum = 0.0, sum_c = 0.0;
    double sumsq = 0.0, sumsq_c = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();

    void add(double z) {
        ++n;
        double y = z - sum_c;
        double t = sum + y;
        sum_c = (t - sum) - y;
        sum = t;
        double z2 = z * z;
        y = z2 - sumsq_c;
        t = sumsq + y;
        sumsq_c = (t - sumsq) - y;
        sumsq = t;
        mn = std::min(mn, z);
        mx = std::max(mx, z);
    }
};

}  // namespace

StatsStack rasterize_stats(const std::vector<Point3>& points, const GridHeader& header,
                           double radius, int threads) {
    validate_header(header);
    if (!(radius > 0.0)) fail("radius must be > 0");
    if (threads < 1) threads = 1;

    const int nrows = header.nrows;
    const int ncols = header.ncols;
    const double cs = header.cellsize;
    const double r2 = radius * radius;

    std::vector<CellAcc> acc(static_cast<std::size_t>(nrows) * ncols);

    // Each worker owns a contiguous band of rows and scans the full point
    // list, so every cell sees points in file order regardless of the worker
    // count. Points are pre-filtered against the band's y extent.
    auto run_band = [&](int row_begin, int row_end) {
        if (row_begin >= row_end) return;
        // y extent of the band's cell centers, padded by the circle radius
        const double band_ymax =
            header.yll + (nrows - row_begin - 0.5) * cs + radius;
        const double band_ymin =
            header.yll + (nrows - (row_end - 1) - 0.5) * cs - radius;
        for (const Point3& p : points) {
            if (p.y < band_ymin || p.y > band_ymax) continue;
            // candidate rows/cols widened by one cell; the exact distance
            // test below decides membership
            double rlo_f = (nrows - 0.5) - (p.y + radius - header.yll) / cs;
            double rhi_f = (nrows - 0.5) - (p.y - radius - header.yll) / cs;
            int rlo = std::max(row_begin, static_cast<int>(std::floor(rlo_f)) - 1);
            int rhi = std::min(row_end - 1, static_cast<int>(std::ceil(rhi_f)) + 1);
            double clo_f = (p.x - radius - header.xll) / cs - 0.5;
            double chi_f = (p.x + radius - header.xll) / cs - 0.5;
            int clo = std::max(0, static_cast<int>(std::floor(clo_f)) - 1);
            int chi = std::min(ncols - 1, static_cast<int>(std::ceil(chi_f)) + 1);
            for (int r = rlo; r <= rhi; ++r) {
                const double dy = p.y - (header.yll + (nrows - r - 0.5) * cs);
                const double dy2 = dy * dy;
                if (dy2 > r2) continue;
                for (int c = clo; c <= chi; ++c) {
                    const double dx = p.x - (header.xll + (c + 0.5) * cs);
                    if (dx * dx + dy2 <= r2)
                        acc[static_cast<std::size_t>(r) * ncols + c].add(p.z);
                }
            }
        }
    };

    const int workers = std::min(threads, nrows);
    if (workers <= 1) {
        run_band(0, nrows);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const int base = nrows / workers, extra = nrows % workers;
        int row = 0;
        for (int w = 0; w < workers; ++w) {
            const int count = base + (w < extra ? 1 : 0);
            pool.emplace_back(run_band, row, row + count);
            row += count;
        }
        for (auto& t : pool) t.join();
    }

    StatsStack out{Raster(header, header.nodata), Raster(header, header.nodata),
                   Raster(header, header.nodata), Raster(header, header.nodata),
                   Raster(header, 0.0)};
    for (int r = 0; r < nrows; ++r) {
        for (int c = 0; c < ncols; ++c) {
            const CellAcc& a = acc[static_cast<std::size_t>(r) * ncols + c];
            if (a.n == 0) continue;
            const double n = static_cast<double>(a.n);
            const double mean = a.sum / n;
            const double var = std::max(0.0, a.sumsq / n - mean * mean);
            out.min.at(r, c) = a.mn;
            out.max.at(r, c) = a.mx;
            out.mean.at(r, c) = mean;
            out.std.at(r, c) = std::sqrt(var);
            out.count.at(r, c) = n;
        }
    }
    return out;
}

}  // namespace lczmap
