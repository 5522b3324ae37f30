// Deterministic report serialization.
//
// Reports must be byte-identical across runs and platforms, so floats are
// rendered with a fixed scientific format (12 significant digits), JSON
// objects keep insertion order, and files are written atomically via a
// temporary file plus rename.

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace carlemanlab {

// Scientific notation with 12 significant digits ("-1.23456789012e-03").
// Non-finite values render as the strings "nan", "inf", "-inf".
std::string format_real(double v);

// ---------------------------------------------------------------------------
// Insertion-ordered JSON object.  Values are rendered at insertion time so
// the dump is a pure concatenation; nested objects and arrays are supported
// through the corresponding setters.
// ---------------------------------------------------------------------------
class JsonObject {
  public:
    JsonObject& set(const std::string& key, const std::string& v);
    JsonObject& set(const std::string& key, const char* v);
    JsonObject& set(const std::string& key, double v);
    JsonObject& set(const std::string& key, int v);
    JsonObject& set(const std::string& key, long long v);
    JsonObject& set(const std::string& key, bool v);
    JsonObject& set(const std::string& key, const JsonObject& v);
    JsonObject& set(const std::string& key, const std::vector<double>& v);
    JsonObject& set(const std::string& key, const std::vector<JsonObject>& v);

    // Two-space-indented dump with a trailing newline.
    std::string dump() const;

  private:
    // key -> pre-rendered value (raw JSON text)
    std::vector<std::pair<std::string, std::string>> items_;

    JsonObject& set_raw(const std::string& key, std::string raw);
    friend std::string render_object(const JsonObject& o, int depth);
};

std::string json_escape(const std::string& s);

// ---------------------------------------------------------------------------
// CSV table with a fixed header.  Cells are plain strings; use cell() to
// render numbers consistently with the JSON output.
// ---------------------------------------------------------------------------
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);  // must match header width
    std::string dump() const;

    static std::string cell(double v) { return format_real(v); }
    static std::string cell(int v) { return std::to_string(v); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Atomic file output: write to <path>.tmp in the same directory, then rename
// over the target.  Creates parent directories as needed.
// ---------------------------------------------------------------------------
void write_file_atomic(const std::string& path, const std::string& content);

// Two-column whitespace-separated plot data file ("x y" per line).
void write_plot_data(const std::string& path,
                     const std::vector<std::pair<double, double>>& xy);

}  // namespace carlemanlab
