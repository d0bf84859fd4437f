#include "lczmap/geogrid.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "lczmap/textio.hpp"

namespace lczmap {

void validate_header(const GridHeader& h) {
    if (h.ncols < 1 || h.nrows < 1) fail("grid header: ncols and nrows must be >= 1");
    if (!(h.cellsize > 0.0)) fail("grid header: cellsize must be > 0");
    if (!std::isfinite(h.xll) || !std::isfinite(h.yll) || !std::isfinite(h.nodata))
        fail("grid header: coordinates and nodata must be finite");
}

Raster::Raster(const GridHeader& h, double fill) : header(h) {
    validate_header(h);
    values.assign(static_cast<std::size_t>(h.nrows) * h.ncols, fill);
}

CategoryRaster::CategoryRaster(const GridHeader& h, int fill) : header(h) {
    validate_header(h);
    codes.assign(static_cast<std::size_t>(h.nrows) * h.ncols, fill);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& msg) {
    fail(path + ":" + std::to_string(lineno) + ": " + msg);
}

// Reads the six fixed-order header lines. Leaves the stream at the first data
// row and lineno at the last header line.
GridHeader read_header(std::ifstream& in, const std::string& path, int& lineno) {
    static const char* keys[6] = {"ncols",    "nrows",    "xllcorner",
                                  "yllcorner", "cellsize", "nodata_value"};
    std::string raw[6];
    for (int i = 0; i < 6; ++i) {
        std::string line;
        if (!std::getline(in, line))
            parse_fail(path, lineno + 1, std::string("missing header line '") + keys[i] + "'");
        ++lineno;
        strip_cr(line);
        auto tokens = split_ws(line);
        if (tokens.size() != 2)
            parse_fail(path, lineno, std::string("expected '") + keys[i] + " <value>'");
        if (to_lower(tokens[0]) != keys[i])
            parse_fail(path, lineno, "malformed header keyword '" + tokens[0] +
                                         "', expected '" + keys[i] + "'");
        raw[i] = tokens[1];
    }

    GridHeader h;
    long long n;
    if (!parse_int(raw[0], n) || n < 1) parse_fail(path, 1, "invalid ncols '" + raw[0] + "'");
    h.ncols = static_cast<int>(n);
    if (!parse_int(raw[1], n) || n < 1) parse_fail(path, 2, "invalid nrows '" + raw[1] + "'");
    h.nrows = static_cast<int>(n);
    if (!parse_double(raw[2], h.xll)) parse_fail(path, 3, "invalid xllcorner '" + raw[2] + "'");
    if (!parse_double(raw[3], h.yll)) parse_fail(path, 4, "invalid yllcorner '" + raw[3] + "'");
    if (!parse_double(raw[4], h.cellsize) || !(h.cellsize > 0.0))
        parse_fail(path, 5, "invalid cellsize '" + raw[4] + "'");
    if (!parse_double(raw[5], h.nodata) || !std::isfinite(h.nodata))
        parse_fail(path, 6, "invalid nodata_value '" + raw[5] + "'");
    return h;
}

// Data rows: exactly nrows lines of ncols tokens; anything after is an error.
template <typename CellFn>
void read_rows(std::ifstream& in, const std::string& path, int& lineno, const GridHeader& h,
               CellFn&& cell) {
    std::string line;
    for (int r = 0; r < h.nrows; ++r) {
        if (!std::getline(in, line))
            parse_fail(path, lineno + 1, "wrong value count: expected " +
                                             std::to_string(h.nrows) + " data rows, got " +
                                             std::to_string(r));
        ++lineno;
        strip_cr(line);
        auto tokens = split_ws(line);
        if (static_cast<int>(tokens.size()) != h.ncols)
            parse_fail(path, lineno, "wrong value count: expected " + std::to_string(h.ncols) +
                                         " values, got " + std::to_string(tokens.size()));
        for (int c = 0; c < h.ncols; ++c) cell(r, c, tokens[c], lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (!trim(line).empty())
            parse_fail(path, lineno, "wrong value count: unexpected extra data");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF newlines everywhere
    if (!out) fail("cannot open '" + path + "' for writing");
    return out;
}

void write_header(std::ofstream& out, const GridHeader& h) {
    out << "ncols " << fmt_int(h.ncols) << "\n"
        << "nrows " << fmt_int(h.nrows) << "\n"
        << "xllcorner " << fmt_double(h.xll) << "\n"
        << "yllcorner " << fmt_double(h.yll) << "\n"
        << "cellsize " << fmt_double(h.cellsize) << "\n"
        << "nodata_value " << fmt_double(h.nodata) << "\n";
}

}  // namespace

Raster read_ascii_raster(const std::string& path) {
    auto in = open_input(path);
    int lineno = 0;
    GridHeader h = read_header(in, path, lineno);
    Raster grid(h, h.nodata);
    read_rows(in, path, lineno, h, [&](int r, int c, const std::string& tok, int ln) {
        double v;
        if (!parse_double(tok, v)) parse_fail(path, ln, "non-numeric token '" + tok + "'");
        if (!std::isfinite(v)) parse_fail(path, ln, "non-finite value '" + tok + "'");
        grid.at(r, c) = v;
    });
    return grid;
}

CategoryRaster read_ascii_category(const std::string& path) {
    auto in = open_input(path);
    int lineno = 0;
    GridHeader h = read_header(in, path, lineno);
    if (h.nodata != std::floor(h.nodata))
        fail(path + ":6: category nodata_value must be an integer");
    CategoryRaster grid(h, static_cast<int>(h.nodata));
    read_rows(in, path, lineno, h, [&](int r, int c, const std::string& tok, int ln) {
        long long v;
        if (!parse_int(tok, v)) parse_fail(path, ln, "non-integer code '" + tok + "'");
        if (v != static_cast<long long>(h.nodata) && (v < 0 || v > 255))
            parse_fail(path, ln, "category code out of range [0,255]: '" + tok + "'");
        grid.at(r, c) = static_cast<int>(v);
    });
    return grid;
}

void write_ascii_grid(const Raster& grid, const std::string& path) {
    validate_header(grid.header);
    if (grid.values.size() !=
        static_cast<std::size_t>(grid.header.nrows) * grid.header.ncols)
        fail("raster value count does not match header dimensions");
    for (double v : grid.values)
        if (!std::isfinite(v)) fail("raster contains a non-finite value");
    auto out = open_output(path);
    write_header(out, grid.header);
    for (int r = 0; r < grid.rows(); ++r) {
        for (int c = 0; c < grid.cols(); ++c) {
            if (c) out << ' ';
            out << fmt_double(grid.at(r, c));
        }
        out << '\n';
    }
    if (!out) fail("error writing '" + path + "'");
}

void write_ascii_grid(const CategoryRaster& grid, const std::string& path) {
    validate_header(grid.header);
    if (grid.header.nodata != std::floor(grid.header.nodata))
        fail("category nodata sentinel must be an integer");
    if (grid.codes.size() !=
        static_cast<std::size_t>(grid.header.nrows) * grid.header.ncols)
        fail("category raster code count does not match header dimensions");
    for (int v : grid.codes)
        if (v != grid.nodata_code() && (v < 0 || v > 255))
            fail("category code out of range [0,255]: " + std::to_string(v));
    auto out = open_output(path);
    write_header(out, grid.header);
    for (int r = 0; r < grid.rows(); ++r) {
        for (int c = 0; c < grid.cols(); ++c) {
            if (c) out << ' ';
            out << fmt_int(grid.at(r, c));
        }
        out << '\n';
    }
    if (!out) fail("error writing '" + path + "'");
}

std::vector<PatchWindow> tile_patches(const GridHeader& h, int patch_pixels) {
    validate_header(h);
    if (patch_pixels < 1) fail("patch_pixels must be >= 1");
    const int prows = h.nrows / patch_pixels;
    const int pcols = h.ncols / patch_pixels;
    std::vector<PatchWindow> out;
    out.reserve(static_cast<std::size_t>(prows) * pcols);
    for (int i = 0; i < prows; ++i)
        for (int j = 0; j < pcols; ++j)
            out.push_back({i * patch_pixels, j * patch_pixels, patch_pixels, i, j});
    return out;
}

std::string patch_id(const PatchWindow& w) {
    return "r" + std::to_string(w.prow) + "c" + std::to_string(w.pcol);
}

bool parse_patch_id(const std::string& id, int& prow, int& pcol) {
    if (id.size() < 4 || id[0] != 'r') return false;
    auto cpos = id.find('c', 1);
    if (cpos == std::string::npos || cpos == 1 || cpos + 1 >= id.size()) return false;
    long long r, c;
    if (!parse_int(std::string_view(id).substr(1, cpos - 1), r)) return false;
    if (!parse_int(std::string_view(id).substr(cpos + 1), c)) return false;
    if (r < 0 || c < 0) return false;
    prow = static_cast<int>(r);
    pcol = static_cast<int>(c);
    return true;
}

}  // namespace lczmap
