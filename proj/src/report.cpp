#include "carlemanlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace carlemanlab {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

namespace {

// Numbers that must parse back as JSON numbers; non-finite ones become
// strings so the file stays valid JSON.
std::string json_real(double v) {
    if (std::isfinite(v)) return format_real(v);
    return "\"" + format_real(v) + "\"";
}

std::string indent_of(int depth) { return std::string(static_cast<std::size_t>(2 * depth), ' '); }

// Re-indent a pre-rendered nested value by prefixing every line after the
// first; pre-rendered text is produced at depth 0.
std::string reindent(const std::string& raw, int depth) {
    std::string out;
    for (char c : raw) {
        out += c;
        if (c == '\n') out += indent_of(depth);
    }
    return out;
}

}  // namespace

std::string render_object(const JsonObject& o, int depth) {
    if (o.items_.empty()) return "{}";
    std::string out = "{\n";
    for (std::size_t i = 0; i < o.items_.size(); ++i) {
        out += indent_of(depth + 1);
        out += "\"" + json_escape(o.items_[i].first) + "\": ";
        out += reindent(o.items_[i].second, depth + 1);
        out += (i + 1 < o.items_.size()) ? ",\n" : "\n";
    }
    out += indent_of(depth) + "}";
    return out;
}

JsonObject& JsonObject::set_raw(const std::string& key, std::string raw) {
    items_.emplace_back(key, std::move(raw));
    return *this;
}

JsonObject& JsonObject::set(const std::string& key, const std::string& v) {
    return set_raw(key, "\"" + json_escape(v) + "\"");
}
JsonObject& JsonObject::set(const std::string& key, const char* v) {
    return set(key, std::string(v));
}
JsonObject& JsonObject::set(const std::string& key, double v) {
    return set_raw(key, json_real(v));
}
JsonObject& JsonObject::set(const std::string& key, int v) {
    return set_raw(key, std::to_string(v));
}
JsonObject& JsonObject::set(const std::string& key, long long v) {
    return set_raw(key, std::to_string(v));
}
JsonObject& JsonObject::set(const std::string& key, bool v) {
    return set_raw(key, v ? "true" : "false");
}
JsonObject& JsonObject::set(const std::string& key, const JsonObject& v) {
    return set_raw(key, render_object(v, 0));
}
JsonObject& JsonObject::set(const std::string& key, const std::vector<double>& v) {
    std::string raw = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) raw += ", ";
        raw += json_real(v[i]);
    }
    raw += "]";
    return set_raw(key, raw);
}
JsonObject& JsonObject::set(const std::string& key, const std::vector<JsonObject>& v) {
    if (v.empty()) return set_raw(key, "[]");
    std::string raw = "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        raw += "  " + reindent(render_object(v[i], 0), 1);
        raw += (i + 1 < v.size()) ? ",\n" : "\n";
    }
    raw += "]";
    return set_raw(key, raw);
}

std::string JsonObject::dump() const { return render_object(*this, 0) + "\n"; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
        throw std::invalid_argument("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::dump() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ",";
        out += header_[i];
    }
    out += "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += row[i];
        }
        out += "\n";
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

void write_plot_data(const std::string& path,
                     const std::vector<std::pair<double, double>>& xy) {
    std::string content;
    for (const auto& [x, y] : xy) content += format_real(x) + " " + format_real(y) + "\n";
    write_file_atomic(path, content);
}

}  // namespace carlemanlab
