#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace bridgefactor {

// Grid-indexed result rows plus scalar summaries; every row has one value
// per column, NaN marking an undefined overlay cell.
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> summary;
};

namespace table_io {

// CSV with '#'-prefixed provenance lines, then '# summary key = value'
// lines, a header row, and %.17g data rows with LF endings; NaN prints
// as "nan".
std::string to_csv(const CurveTable& table,
                   const std::vector<std::string>& provenance);

// JSON object {"config": <config_object_json>, "summary": {...},
// "rows": [{column: value-or-null}]}; NaN maps to null.
std::string to_json(const CurveTable& table,
                    const std::string& config_object_json);

}  // namespace table_io
}  // namespace bridgefactor
