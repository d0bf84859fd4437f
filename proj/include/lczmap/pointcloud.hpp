#pragma once

#include <string>
#include <vector>

#include "lczmap/geogrid.hpp"

namespace lczmap {

struct Point3 {
    double x = 0.0;  // easting, meters
    double y = 0.0;  // northing, meters
    double z = 0.0;  // elevation / height above ground, meters
};

// Five aligned per-cell statistics rasters. Cells no point circle touches are
// NODATA in min/max/mean/std and 0 in count.
struct StatsStack {
    Raster min;
    Raster max;
    Raster mean;
    Raster std;
    Raster count;
};

// XYZ text format: one "x,y,z" line per point, '#' comment lines ignored,
// LF or CRLF. Points are returned in file order.
std::vector<Point3> read_xyz(const std::string& path);
void write_xyz(const std::vector<Point3>& points, const std::string& path);

// Sliding-circle accumulation: every cell gathers all points whose (x,y) lies
// within Euclidean distance <= radius of the cell center; min/max/mean are
// over those points' z, std is the population standard deviation, count the
// point count. Each cell is accumulated in point input order by exactly one
// worker, so results are identical for any thread count.
StatsStack rasterize_stats(const std::vector<Point3>& points, const GridHeader& header,
                           double radius, int threads = 1);

}  // namespace lczmap
