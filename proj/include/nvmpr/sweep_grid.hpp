#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nvmpr {

struct Axis {
  std::string name;  // e.g. "B_S"
  std::string unit;  // e.g. "mT"
  std::vector<double> values;
};

struct CellFlag {
  std::size_t row = 0;
  std::size_t col = 0;
  std::string reason;  // machine-readable code, e.g. "unsupported_range"
};

// 2-D map over (rows x cols), row-major. Flagged cells hold NaN.
struct SweepGrid {
  Axis rows;
  Axis cols;
  std::vector<double> values;
  std::vector<CellFlag> flags;
  std::string quantity = "P_z/P_zs";
  std::map<std::string, std::string> metadata;

  double& at(std::size_t r, std::size_t c) { return values[r * cols.values.size() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols.values.size() + c]; }

  // Shapes agree, NaN cells are exactly the flagged cells.
  void validate() const;
};

inline constexpr std::string_view kFrequencyAxis = "f_LA";
inline constexpr std::string_view kFieldAxis = "B_S";

SweepGrid transposed(const SweepGrid& grid);

// d(value)/d(f_LA) in value units per MHz, wherever the f_LA axis sits.
// Second-order three-point differences, one-sided at the ends.
SweepGrid derivative_map(const SweepGrid& grid);

enum class GridFormat { Csv, Json };

GridFormat parse_grid_format(std::string_view name);

// CSV: header "<row>_<unit>\<col>_<unit>,c0,c1,...", then one line per row
// value. NaN cells are empty fields; quantity, metadata and flags go to the
// sidecar "<path>.meta.json". Numbers use the shortest round-trip form.
void write_grid(const SweepGrid& grid, const std::string& path, GridFormat format);
SweepGrid read_grid(const std::string& path, GridFormat format);

std::string grid_to_json(const SweepGrid& grid);
SweepGrid grid_from_json(const std::string& text);
std::string grid_to_csv(const SweepGrid& grid);
SweepGrid grid_from_csv(const std::string& text);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace nvmpr
