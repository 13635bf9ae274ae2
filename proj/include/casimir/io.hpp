#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "casimir/spectrum.hpp"

namespace casimir::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to exactly `x`.
std::string format_number(double x);

using Cell = std::variant<double, long, bool, std::string>;

/// Columnar data written as CSV, or as a JSON document holding the same
/// columns, rows and a provenance object.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string to_csv(const Table& table);
nlohmann::ordered_json to_json(const Table& table, const nlohmann::ordered_json& provenance);
/// Inverse of to_csv; numeric cells come back as double, "true"/"false" as bool.
Table parse_csv(std::string_view text);

/// Writes to a temporary file in the target directory and renames it into
/// place, so `path` either keeps its old content or holds all of `content`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Mask file: rows of '0'/'1' characters.
RasterMask read_mask(const std::filesystem::path& path, double h);

/// Columns lambda, lambda_sq, degeneracy, bc (plus error_estimate for raster input).
Table spectrum_table(const Spectrum& spec);
nlohmann::ordered_json spectrum_provenance(const Spectrum& spec);

}  // namespace casimir::io
