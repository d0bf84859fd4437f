#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lczmap {

// Recoverable input/validation/IO failures throw Error; the CLI maps Error to
// exit code 1 and any other exception to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

struct GridHeader {
    int ncols = 0;
    int nrows = 0;
    double xll = 0.0;       // lower-left corner easting, meters
    double yll = 0.0;       // lower-left corner northing, meters
    double cellsize = 1.0;  // meters
    double nodata = -9999.0;

    bool operator==(const GridHeader&) const = default;
};

void validate_header(const GridHeader& h);

// Two grids are aligned iff their headers match field-by-field.
inline bool aligned(const GridHeader& a, const GridHeader& b) { return a == b; }

// Real-valued georeferenced grid. Row 0 is the northernmost row.
struct Raster {
    GridHeader header;
    std::vector<double> values;  // nrows*ncols, row-major

    Raster() = default;
    Raster(const GridHeader& h, double fill);

    double at(int r, int c) const {
        return values[static_cast<std::size_t>(r) * header.ncols + c];
    }
    double& at(int r, int c) {
        return values[static_cast<std::size_t>(r) * header.ncols + c];
    }
    bool is_nodata(int r, int c) const { return at(r, c) == header.nodata; }
    int rows() const { return header.nrows; }
    int cols() const { return header.ncols; }
};

// Land-cover grid with small non-negative integer codes (<= 255) plus an
// integer NODATA sentinel.
struct CategoryRaster {
    GridHeader header;
    std::vector<int> codes;  // nrows*ncols, row-major

    CategoryRaster() = default;
    CategoryRaster(const GridHeader& h, int fill);

    int at(int r, int c) const {
        return codes[static_cast<std::size_t>(r) * header.ncols + c];
    }
    int& at(int r, int c) {
        return codes[static_cast<std::size_t>(r) * header.ncols + c];
    }
    int nodata_code() const { return static_cast<int>(header.nodata); }
    bool is_nodata(int r, int c) const { return at(r, c) == nodata_code(); }
    int rows() const { return header.nrows; }
    int cols() const { return header.ncols; }
};

// ASCII grid I/O. Six header lines (ncols, nrows, xllcorner, yllcorner,
// cellsize, nodata_value), then nrows lines of ncols space-separated values,
// north row first. Keywords are case-insensitive on read, written lowercase.
Raster read_ascii_raster(const std::string& path);
CategoryRaster read_ascii_category(const std::string& path);
void write_ascii_grid(const Raster& grid, const std::string& path);
void write_ascii_grid(const CategoryRaster& grid, const std::string& path);

// One square pixel window plus its patch-grid coordinates.
struct PatchWindow {
    int row0 = 0;
    int col0 = 0;
    int size = 0;
    int prow = 0;
    int pcol = 0;
};

// Row-major list of non-overlapping patch_pixels x patch_pixels windows fully
// contained in the grid. Partial border windows are dropped.
std::vector<PatchWindow> tile_patches(const GridHeader& h, int patch_pixels);

std::string patch_id(const PatchWindow& w);

// Parses an id of the form r<prow>c<pcol>; returns false on anything else.
bool parse_patch_id(const std::string& id, int& prow, int& pcol);

}  // namespace lczmap
