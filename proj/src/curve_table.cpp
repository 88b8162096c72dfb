#include "bridgefactor/curve_table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace bridgefactor::table_io {

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_shape(const CurveTable& table) {
  if (table.columns.empty()) throw std::invalid_argument("table has no columns");
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size())
      throw std::invalid_argument("row width does not match column count");
}

}  // namespace

std::string to_csv(const CurveTable& table,
                   const std::vector<std::string>& provenance) {
  require_shape(table);
  std::string out;
  for (const auto& line : provenance) out += "# " + line + "\n";
  for (const auto& [key, value] : table.summary)
    out += "# summary " + key + " = " + format_value(value) + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_value(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const CurveTable& table,
                    const std::string& config_object_json) {
  require_shape(table);
  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(config_object_json);
  auto& summary = doc["summary"] = nlohmann::json::object();
  for (const auto& [key, value] : table.summary) {
    if (std::isnan(value))
      summary[key] = nullptr;
    else
      summary[key] = value;
  }
  auto& rows = doc["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isnan(row[c]))
        obj[table.columns[c]] = nullptr;
      else
        obj[table.columns[c]] = row[c];
    }
    rows.push_back(std::move(obj));
  }
  return doc.dump(2);
}

}  // namespace bridgefactor::table_io
