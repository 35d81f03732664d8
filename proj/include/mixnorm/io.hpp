#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mixnorm::io {

inline constexpr int kSchemaVersion = 1;

/// Seeds and other 64-bit ids travel as decimal strings in JSON.
struct Id {
    std::uint64_t value;
};

using Value = std::variant<double, std::int64_t, Id, bool, std::string>;

/// Ordered key/value record describing a run.
using Config = std::vector<std::pair<std::string, Value>>;

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double v);

std::string to_text(const Value& v);

enum class Format { Csv, Json };

/// Record-at-a-time writer so large outputs stream in constant memory.
///
/// CSV: "# key=value" config lines, one header line, then rows.
/// JSON: {"schema_version":1,"config":{...},"results":[{column: value}...]}.
class RecordWriter {
  public:
    RecordWriter(std::ostream& out, Format format, const Config& config, std::vector<std::string> columns);
    RecordWriter(const RecordWriter&) = delete;
    RecordWriter& operator=(const RecordWriter&) = delete;
    ~RecordWriter();

    void write(const std::vector<Value>& row);
    /// Closes the JSON document; called by the destructor if omitted.
    void finish();

  private:
    std::ostream& out_;
    Format format_;
    std::vector<std::string> columns_;
    std::size_t rows_ = 0;
    bool finished_ = false;
};

/// A parsed CSV or JSON document with every value kept as text.
struct ParsedTable {
    int schema_version = 0;
    std::map<std::string, std::string> config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

ParsedTable parse_csv(std::istream& in);
ParsedTable parse_json(std::istream& in);

}  // namespace mixnorm::io
