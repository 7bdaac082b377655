// writers.hpp: deterministic tables (RFC 4180 CSV or JSON) and the run report.

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qfridge/errors.hpp"

namespace qfridge::cli {

using nlohmann::json;

// Shortest decimal that round-trips; independent of the locale.
inline std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

using Cell = std::variant<std::monostate, double, long, bool, std::string>;

inline Cell opt_cell(const std::optional<double>& v) {
    if (v)
        return *v;
    return std::monostate{};
}

inline std::string csv_field(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\r\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"')
                    q += '"';
                q += ch;
            }
            return q + "\"";
        }
    };
    return std::visit(Visitor{}, c);
}

inline json json_value(const Cell& c) {
    struct Visitor {
        json operator()(std::monostate) const { return nullptr; }
        json operator()(double v) const { return std::isfinite(v) ? json(v) : json(format_number(v)); }
        json operator()(long v) const { return v; }
        json operator()(bool v) const { return v; }
        json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::logic_error("table '" + name + "': row width does not match the header");
        rows.push_back(std::move(row));
    }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i)
            out += (i ? "," : "") + csv_field(columns[i]);
        out += "\r\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out += (i ? "," : "") + csv_field(r[i]);
            out += "\r\n";
        }
        return out;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& r : rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < r.size(); ++i)
                obj[columns[i]] = json_value(r[i]);
            arr.push_back(obj);
        }
        return arr;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace qfridge::cli
