#include "aerochan/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aerochan/errors.hpp"

namespace aerochan {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

double parse_number(std::string_view cell) {
  const std::string s(cell);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw NumericError("bad numeric cell '" + s + "'");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(sep, begin);
    out.push_back(line.substr(begin, pos == std::string_view::npos ? pos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

}  // namespace

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw NumericError("row has " + std::to_string(row.size()) + " cells, table has " +
                       std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

const std::string* ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::size_t ResultTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw NumericError("no column named '" + std::string(name) + "'");
}

std::vector<double> ResultTable::column(std::string_view name) const {
  const std::size_t i = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[i]);
  return out;
}

void ResultTable::validate() const {
  for (const auto& c : columns) {
    if (c.name.empty() || c.unit.empty()) throw NumericError("every column needs a name and a unit");
  }
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw NumericError("ragged result table");
  }
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("output.format", "unknown output format '" + std::string(name) + "'");
}

std::string format_csv(const ResultTable& table) {
  table.validate();
  std::string out;
  for (const auto& [k, v] : table.metadata) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i].name + " [" + table.columns[i].unit + "]";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(std::string_view text) {
  ResultTable t;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(line.substr(1));
      const auto colon = body.find(": ");
      if (colon == std::string::npos) {
        t.metadata.emplace_back(body, "");
      } else {
        t.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
      }
      continue;
    }
    if (!header_seen) {
      for (auto cell : split(line, ',')) {
        const std::string c = trim(cell);
        const auto open = c.rfind(" [");
        if (open == std::string::npos || c.back() != ']') {
          throw NumericError("header cell '" + c + "' lacks a [unit]");
        }
        t.columns.push_back({c.substr(0, open), c.substr(open + 2, c.size() - open - 3)});
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (auto cell : split(line, ',')) row.push_back(parse_number(trim(cell)));
    t.add_row(std::move(row));
  }
  if (!header_seen) throw NumericError("CSV has no header row");
  return t;
}

std::string format_json(const ResultTable& table) {
  table.validate();
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  doc["metadata"] = meta;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : table.columns) doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    // Non-finite values are not valid JSON numbers.
    for (double v : row) {
      if (std::isfinite(v)) {
        r.push_back(v);
      } else {
        r.push_back(format_number(v));
      }
    }
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(1) + "\n";
}

ResultTable parse_json(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw NumericError(std::string("result JSON parse error: ") + e.what());
  }
  ResultTable t;
  for (auto it = doc.at("metadata").begin(); it != doc.at("metadata").end(); ++it) {
    t.metadata.emplace_back(it.key(), it.value().get<std::string>());
  }
  for (const auto& c : doc.at("columns")) {
    t.columns.push_back({c.at("name").get<std::string>(), c.at("unit").get<std::string>()});
  }
  for (const auto& r : doc.at("rows")) {
    std::vector<double> row;
    for (const auto& v : r) row.push_back(v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>());
    t.add_row(std::move(row));
  }
  return t;
}

void write_results(const ResultTable& table, const std::filesystem::path& path,
                   OutputFormat format) {
  const std::string text = format == OutputFormat::Csv ? format_csv(table) : format_json(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

ResultTable read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  return parse_csv(text);
}

}  // namespace aerochan
