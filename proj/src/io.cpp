#include "casimir/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <system_error>

namespace casimir::io {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("table row width does not match the header");
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    } visit;
    return std::visit(visit, c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    return fields;
}

Cell parse_cell(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty()) return v;
    return s;
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cell_text(row[i]));
        }
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json to_json(const Table& table, const nlohmann::ordered_json& provenance) {
    nlohmann::ordered_json doc;
    doc["provenance"] = provenance;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        // JSON has no inf/nan literals
                        if (std::isfinite(v)) obj[table.columns[i]] = v;
                        else obj[table.columns[i]] = format_number(v);
                    } else {
                        obj[table.columns[i]] = v;
                    }
                },
                row[i]);
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

Table parse_csv(std::string_view text) {
    Table t;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (header) {
            t.columns = std::move(fields);
            header = false;
            continue;
        }
        std::vector<Cell> row;
        for (const auto& f : fields) row.push_back(parse_cell(f));
        t.add_row(std::move(row));
    }
    return t;
}

void write_atomic(const fs::path& path, std::string_view content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("output directory does not exist: " + dir.string());
    std::random_device rd;
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

RasterMask read_mask(const fs::path& path, double h) { return RasterMask::from_text(read_file(path), h); }

Table spectrum_table(const Spectrum& spec) {
    Table t;
    t.columns = {"lambda", "lambda_sq", "degeneracy", "bc"};
    const bool raster = spec.grid_spacing.has_value();
    if (raster) t.columns.push_back("error_estimate");
    for (const auto& m : spec.modes) {
        std::vector<Cell> row = {m.lambda, m.lambda_sq, static_cast<long>(m.degeneracy), std::string(to_string(m.bc))};
        if (raster) row.emplace_back(m.error_estimate);
        t.add_row(std::move(row));
    }
    return t;
}

nlohmann::ordered_json spectrum_provenance(const Spectrum& spec) {
    nlohmann::ordered_json p;
    p["cross_section"] = describe(spec.cross_section);
    p["area"] = spec.area;
    p["modes_per_set"] = spec.n_requested;
    auto sets = nlohmann::ordered_json::array();
    for (auto bc : spec.sets) sets.push_back(std::string(to_string(bc)));
    p["sets"] = sets;
    if (spec.grid_spacing) p["h"] = *spec.grid_spacing;
    return p;
}

}  // namespace casimir::io
