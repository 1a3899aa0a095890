#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "kruns/cli.hpp"

namespace kruns::cli {

using nlohmann::ordered_json;

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

namespace {

std::string render_cell(const Cell& c, int precision) {
    if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&c)) {
        if (precision >= 0) return format_fixed(*d, precision);
        // shortest form that reads back to the same double
        char buf[64];
        for (int digits = 15; digits <= 17; ++digits) {
            std::snprintf(buf, sizeof buf, "%.*g", digits, *d);
            if (std::strtod(buf, nullptr) == *d) break;
        }
        return buf;
    }
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + "\"";
}

ordered_json cell_to_json(const Cell& c) {
    if (auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (auto* d = std::get_if<double>(&c)) return *d;
    return std::get<std::string>(c);
}

Cell cell_from_json(const ordered_json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw std::invalid_argument("unsupported JSON cell type");
}

}  // namespace

std::string to_csv(const Report& r) {
    std::ostringstream os;
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto it = r.precision.find(r.columns[c]);
            os << (c ? "," : "") << render_cell(row[c], it == r.precision.end() ? -1 : it->second);
        }
        os << '\n';
    }
    return os.str();
}

std::string to_json(const Report& r) {
    ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["config"] = r.config;
    doc["columns"] = r.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[r.columns[c]] = cell_to_json(row[c]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", -1) != kSchemaVersion) {
        throw std::invalid_argument("unknown report schema");
    }
    Report r;
    r.config = doc.at("config");
    r.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& obj : doc.at("rows")) {
        std::vector<Cell> row;
        for (const auto& col : r.columns) row.push_back(cell_from_json(obj.at(col)));
        r.rows.push_back(std::move(row));
    }
    return r;
}

}  // namespace kruns::cli
