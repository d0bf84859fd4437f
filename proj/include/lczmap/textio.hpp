#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lczmap {

// Shortest decimal representation that re-parses to the same double.
std::string fmt_double(double v);
std::string fmt_int(long long v);

// Whole-token numeric parsing. Returns false on empty tokens, trailing
// garbage, or anything std::from_chars rejects.
bool parse_double(std::string_view tok, double& out);
bool parse_int(std::string_view tok, long long& out);

std::string_view trim(std::string_view s);
std::string to_lower(std::string s);

// Splits on a single separator; keeps empty fields.
std::vector<std::string> split(const std::string& line, char sep);

// Splits on runs of spaces/tabs; drops empty fields.
std::vector<std::string> split_ws(const std::string& line);

// Strips a trailing '\r' so CRLF files read like LF files.
void strip_cr(std::string& line);

}  // namespace lczmap
