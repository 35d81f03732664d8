#include "mixnorm/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace mixnorm::io {
namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Value& v) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Id>) {
                return std::to_string(x.value);
            } else if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(x)) return x;
                return nullptr;
            } else {
                return x;
            }
        },
        v);
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quoted CSV field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string json_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return "nan";
    if (j.is_number_float()) return format_double(j.get<double>());
    return j.dump();
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_text(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(x);
            } else if constexpr (std::is_same_v<T, Id>) {
                return std::to_string(x.value);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else {
                return std::to_string(x);
            }
        },
        v);
}

RecordWriter::RecordWriter(std::ostream& out, Format format, const Config& config, std::vector<std::string> columns)
    : out_(out), format_(format), columns_(std::move(columns)) {
    if (format_ == Format::Csv) {
        out_ << "# schema_version=" << kSchemaVersion << '\n';
        for (const auto& [key, value] : config) out_ << "# " << key << '=' << to_text(value) << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << csv_field(columns_[i]);
        out_ << '\n';
        return;
    }
    Json cfg = Json::object();
    for (const auto& [key, value] : config) cfg[key] = to_json(value);
    out_ << "{\"schema_version\":" << kSchemaVersion << ",\"config\":" << cfg.dump() << ",\"results\":[";
}

RecordWriter::~RecordWriter() {
    try {
        finish();
    } catch (...) {
    }
}

void RecordWriter::write(const std::vector<Value>& row) {
    if (finished_) throw std::logic_error("write after finish");
    if (row.size() != columns_.size()) throw std::invalid_argument("row width does not match the header");
    if (format_ == Format::Csv) {
        for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << csv_field(to_text(row[i]));
        out_ << '\n';
    } else {
        Json record = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) record[columns_[i]] = to_json(row[i]);
        out_ << (rows_ ? ",\n" : "\n") << record.dump();
    }
    ++rows_;
}

void RecordWriter::finish() {
    if (finished_) return;
    finished_ = true;
    if (format_ == Format::Json) out_ << (rows_ ? "\n" : "") << "]}\n";
    out_.flush();
}

ParsedTable parse_csv(std::istream& in) {
    ParsedTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error("malformed config line: " + line);
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "schema_version") {
                table.schema_version = std::stoi(value);
            } else {
                table.config[key] = value;
            }
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.columns = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.columns.size()) throw std::runtime_error("CSV row width does not match the header");
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw std::runtime_error("CSV document has no header");
    return table;
}

ParsedTable parse_json(std::istream& in) {
    const Json doc = Json::parse(in);
    ParsedTable table;
    table.schema_version = doc.at("schema_version").get<int>();
    for (const auto& [key, value] : doc.at("config").items()) table.config[key] = json_text(value);
    for (const auto& record : doc.at("results")) {
        if (table.columns.empty()) {
            for (const auto& [key, value] : record.items()) table.columns.push_back(key);
        }
        std::vector<std::string> row;
        for (const auto& col : table.columns) row.push_back(json_text(record.at(col)));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace mixnorm::io
