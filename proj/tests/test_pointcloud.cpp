#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "lczmap/pointcloud.hpp"
#include "lczmap/rng.hpp"

using namespace lczmap;
using testutil::TempDir;

namespace {

// Independent per-cell recomputation over the full point list.
struct CellRef {
    double mn = 0, mx = 0, mean = 0, sd = 0;
    long long n = 0;
};

CellRef naive_cell(const std::vector<Point3>& pts, const GridHeader& h, int r, int c,
                   double radius) {
    const double cx = h.xll + (c + 0.5) * h.cellsize;
    const double cy = h.yll + (h.nrows - r - 0.5) * h.cellsize;
    CellRef out;
    double sum = 0, sumsq = 0;
    for (const auto& p : pts) {
        const double dx = p.x - cx, dy = p.y - cy;
        if (dx * dx + dy * dy > radius * radius) continue;
        if (out.n == 0) {
            out.mn = out.mx = p.z;
        } else {
            out.mn = std::min(out.mn, p.z);
            out.mx = std::max(out.mx, p.z);
        }
        ++out.n;
        sum += p.z;
        sumsq += p.z * p.z;
    }
    if (out.n > 0) {
        out.mean = sum / out.n;
        out.sd = std::sqrt(std::max(0.0, sumsq / out.n - out.mean * out.mean));
    }
    return out;
}

std::vector<Point3> random_cloud(std::mt19937_64& rng, int n, double x0, double x1, double y0,
                                 double y1) {
    std::vector<Point3> pts(n);
    for (auto& p : pts) {
        p.x = uniform(rng, x0, x1);
        p.y = uniform(rng, y0, y1);
        p.z = uniform(rng, -5.0, 60.0);
    }
    return pts;
}

}  // namespace

TEST_SUITE("pointcloud") {

TEST_CASE("reads a one-point file") {
    TempDir td;
    const auto path = td.file("p.xyz");
    testutil::spit(path, "1.0,2.0,3.0\n");
    const auto pts = read_xyz(path);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 1.0);
    CHECK(pts[0].y == 2.0);
    CHECK(pts[0].z == 3.0);
}

TEST_CASE("empty files and comment-only files yield no points") {
    TempDir td;
    const auto path = td.file("p.xyz");
    testutil::spit(path, "");
    CHECK(read_xyz(path).empty());
    testutil::spit(path, "# header\n\n# another\n");
    CHECK(read_xyz(path).empty());
}

TEST_CASE("rejects non-numeric fields with the line number") {
    TempDir td;
    const auto path = td.file("p.xyz");
    testutil::spit(path, "a,b,c\n");
    CHECK_THROWS_WITH_AS(read_xyz(path), doctest::Contains(":1:"), Error);
    testutil::spit(path, "1,2,3\n4,5\n");
    CHECK_THROWS_WITH_AS(read_xyz(path), doctest::Contains(":2:"), Error);
}

TEST_CASE("accepts CRLF and preserves file order") {
    TempDir td;
    const auto path = td.file("p.xyz");
    testutil::spit(path, "1,1,1\r\n2,2,2\r\n");
    const auto pts = read_xyz(path);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].z == 1.0);
    CHECK(pts[1].z == 2.0);
}

TEST_CASE("xyz round-trips bit-for-bit") {
    TempDir td;
    std::mt19937_64 rng(33);
    const auto pts = random_cloud(rng, 200, 0, 10, 0, 10);
    const auto p1 = td.file("a.xyz");
    const auto p2 = td.file("b.xyz");
    write_xyz(pts, p1);
    write_xyz(read_xyz(p1), p2);
    CHECK(testutil::slurp(p1) == testutil::slurp(p2));
}

TEST_CASE("a single point at a cell center") {
    const auto h = testutil::header(5, 5);
    // center of cell (2,2): x = 1.25, y = 1.25
    const std::vector<Point3> pts{{1.25, 1.25, 7.0}};
    const auto s = rasterize_stats(pts, h, 0.75);
    CHECK(s.min.at(2, 2) == 7.0);
    CHECK(s.max.at(2, 2) == 7.0);
    CHECK(s.mean.at(2, 2) == 7.0);
    CHECK(s.std.at(2, 2) == 0.0);
    CHECK(s.count.at(2, 2) == 1.0);
    // the circle overlaps the neighbor centers 0.5 m away as well
    CHECK(s.count.at(2, 3) == 1.0);
    CHECK(s.count.at(1, 2) == 1.0);
    // empty cells are NODATA / 0
    CHECK(s.mean.is_nodata(0, 0));
    CHECK(s.min.is_nodata(0, 0));
    CHECK(s.count.at(0, 0) == 0.0);
}

TEST_CASE("two points in one circle give population statistics") {
    const auto h = testutil::header(3, 3);
    const std::vector<Point3> pts{{0.75, 0.75, 4.0}, {0.75, 0.75, 6.0}};
    const auto s = rasterize_stats(pts, h, 0.75);
    CHECK(s.mean.at(1, 1) == 5.0);
    CHECK(s.std.at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.min.at(1, 1) == 4.0);
    CHECK(s.max.at(1, 1) == 6.0);
    CHECK(s.count.at(1, 1) == 2.0);
}

TEST_CASE("matches the naive per-cell oracle on a random cloud") {
    std::mt19937_64 rng(4242);
    const auto h = testutil::header(8, 8);
    const auto pts = random_cloud(rng, 600, -0.5, 4.5, -0.5, 4.5);
    const auto s = rasterize_stats(pts, h, 0.75);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            const auto ref = naive_cell(pts, h, r, c, 0.75);
            CHECK(s.count.at(r, c) == static_cast<double>(ref.n));
            if (ref.n == 0) {
                CHECK(s.mean.is_nodata(r, c));
                continue;
            }
            CHECK(s.min.at(r, c) == ref.mn);
            CHECK(s.max.at(r, c) == ref.mx);
            CHECK(s.mean.at(r, c) == doctest::Approx(ref.mean).epsilon(1e-12));
            CHECK(std::abs(s.std.at(r, c) - ref.sd) <= 1e-9);
            CHECK(s.min.at(r, c) <= s.mean.at(r, c));
            CHECK(s.mean.at(r, c) <= s.max.at(r, c));
        }
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937_64 rng(99);
    const auto h = testutil::header(6, 6);
    auto pts = random_cloud(rng, 400, 0, 3, 0, 3);
    const auto a = rasterize_stats(pts, h, 0.75);
    shuffle_vec(pts, rng);
    const auto b = rasterize_stats(pts, h, 0.75);
    CHECK(a.min.values == b.min.values);
    CHECK(a.max.values == b.max.values);
    CHECK(a.count.values == b.count.values);
    for (std::size_t i = 0; i < a.mean.values.size(); ++i) {
        CHECK(std::abs(a.mean.values[i] - b.mean.values[i]) <= 1e-9);
        CHECK(std::abs(a.std.values[i] - b.std.values[i]) <= 1e-9);
    }
}

TEST_CASE("thread count does not change the result") {
    std::mt19937_64 rng(123);
    const auto h = testutil::header(16, 11);
    const auto pts = random_cloud(rng, 900, 0, 8, 0, 5.5);
    const auto one = rasterize_stats(pts, h, 0.75, 1);
    for (int workers : {2, 3, 8}) {
        const auto many = rasterize_stats(pts, h, 0.75, workers);
        CHECK(one.min.values == many.min.values);
        CHECK(one.max.values == many.max.values);
        CHECK(one.count.values == many.count.values);
        CHECK(one.mean.values == many.mean.values);
        CHECK(one.std.values == many.std.values);
    }
}

TEST_CASE("uniform plane statistics are flat") {
    std::mt19937_64 rng(2024);
    const auto h = testutil::header(20, 20);  // 10 m x 10 m at 0.5 m
    std::vector<Point3> pts(1000);            // density 10 / m^2
    for (auto& p : pts) {
        p.x = uniform(rng, 0.0, 10.0);
        p.y = uniform(rng, 0.0, 10.0);
        p.z = 5.0;
    }
    const auto s = rasterize_stats(pts, h, 0.75);
    for (int r = 2; r < 18; ++r) {
        for (int c = 2; c < 18; ++c) {
            REQUIRE(s.count.at(r, c) > 0.0);
            CHECK(std::abs(s.mean.at(r, c) - 5.0) <= 1e-9);
            CHECK(s.std.at(r, c) <= 1e-9);
        }
    }
}

TEST_CASE("points outside every circle are ignored") {
    const auto h = testutil::header(2, 2);
    const std::vector<Point3> pts{{100.0, 100.0, 1.0}, {-50.0, 0.25, 2.0}};
    const auto s = rasterize_stats(pts, h, 0.75);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) CHECK(s.count.at(r, c) == 0.0);
}

TEST_CASE("rejects a non-positive radius") {
    const auto h = testutil::header(2, 2);
    CHECK_THROWS_AS(rasterize_stats({}, h, 0.0), Error);
    CHECK_THROWS_AS(rasterize_stats({}, h, -1.0), Error);
}

}  // TEST_SUITE
