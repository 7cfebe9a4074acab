#pragma once

// On-disk formats for Wigner fields and reports.
//
// A field is a JSON header {q0, q1, p0, p1, Nq, Np, hbar, time, data} plus a
// sibling raw payload: Nq * Np little-endian IEEE-754 doubles, row-major
// with q outer. All encoders are deterministic functions of the field bytes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wigneton/patterns.hpp"
#include "wigneton/phase_space_grid.hpp"

namespace wigneton {

nlohmann::json field_header(const WignerField& field, const std::string& payload_name);
std::string encode_f64(const std::vector<double>& values);
// Throws IoError when the byte count is not 8 * expected.
std::vector<double> decode_f64(std::string_view bytes, std::size_t expected);

// "q,p,W" header then one row per node, shortest round-trip decimals.
std::string field_csv(const WignerField& field);

// "q p W" lines, one block per q row, blocks separated by one blank line.
std::string plot_blocks(const WignerField& field);
// "level energy share" lines for a pattern report.
std::string plot_blocks(const PatternReport& report);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Reads a header and its payload (resolved relative to the header).
// Throws IoError on unreadable files and ConfigError on a malformed header.
WignerField load_field(const std::filesystem::path& header_path);

std::string read_file(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it over the target. Throws IoError.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);
// Canonical JSON text (two-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);

std::string sha256_hex(std::string_view bytes);

}  // namespace wigneton
