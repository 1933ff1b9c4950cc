#include "nvmpr/sweep_grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sidecar_path(const std::string& path) { return path + ".meta.json"; }

// Derivative at xs[at] of the parabola through three points.
double lagrange_slope(const double* x, const double* f, int at) {
  const double t = x[at];
  double d = 0.0;
  for (int j = 0; j < 3; ++j) {
    double w = 0.0;
    for (int m = 0; m < 3; ++m) {
      if (m == j) continue;
      double term = 1.0 / (x[j] - x[m]);
      for (int n = 0; n < 3; ++n)
        if (n != j && n != m) term *= (t - x[n]) / (x[j] - x[n]);
      w += term;
    }
    d += w * f[j];
  }
  return d;
}

std::string axis_label(const Axis& a) { return a.unit.empty() ? a.name : a.name + "_" + a.unit; }

Axis axis_from_label(std::string_view label) {
  Axis a;
  const auto cut = label.rfind('_');
  if (cut == std::string_view::npos || cut == 0) {
    a.name = std::string(label);
  } else {
    a.name = std::string(label.substr(0, cut));
    a.unit = std::string(label.substr(cut + 1));
  }
  return a;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError(where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

json axis_json(const Axis& a) { return {{"name", a.name}, {"unit", a.unit}, {"values", a.values}}; }

Axis axis_from(const json& j) {
  Axis a;
  a.name = j.at("name").get<std::string>();
  a.unit = j.at("unit").get<std::string>();
  a.values = j.at("values").get<std::vector<double>>();
  return a;
}

json flags_json(const std::vector<CellFlag>& flags) {
  json out = json::array();
  for (const auto& f : flags) out.push_back({{"row", f.row}, {"col", f.col}, {"reason", f.reason}});
  return out;
}

std::vector<CellFlag> flags_from(const json& j) {
  std::vector<CellFlag> out;
  for (const auto& f : j) out.push_back({f.at("row").get<std::size_t>(), f.at("col").get<std::size_t>(), f.at("reason").get<std::string>()});
  return out;
}

json meta_json(const SweepGrid& g) {
  return {{"quantity", g.quantity}, {"metadata", g.metadata}, {"flags", flags_json(g.flags)}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

void SweepGrid::validate() const {
  if (values.size() != rows.values.size() * cols.values.size())
    throw InvalidParameter("sweep grid: value count does not match axis lengths");
  std::set<std::pair<std::size_t, std::size_t>> flagged;
  for (const auto& f : flags) {
    if (f.row >= rows.values.size() || f.col >= cols.values.size()) throw InvalidParameter("sweep grid: flag outside the grid");
    flagged.insert({f.row, f.col});
  }
  for (std::size_t r = 0; r < rows.values.size(); ++r)
    for (std::size_t c = 0; c < cols.values.size(); ++c)
      if (std::isnan(at(r, c)) && !flagged.count({r, c})) throw InvalidParameter("sweep grid: unflagged NaN cell");
}

SweepGrid transposed(const SweepGrid& grid) {
  SweepGrid t;
  t.rows = grid.cols;
  t.cols = grid.rows;
  t.quantity = grid.quantity;
  t.metadata = grid.metadata;
  const std::size_t nr = grid.rows.values.size(), nc = grid.cols.values.size();
  t.values.resize(grid.values.size());
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) t.values[c * nr + r] = grid.values[r * nc + c];
  for (const auto& f : grid.flags) t.flags.push_back({f.col, f.row, f.reason});
  std::sort(t.flags.begin(), t.flags.end(),
            [](const CellFlag& a, const CellFlag& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  return t;
}

SweepGrid derivative_map(const SweepGrid& grid) {
  grid.validate();
  const bool along_cols = grid.cols.name == kFrequencyAxis;
  if (!along_cols && grid.rows.name != kFrequencyAxis) throw InvalidParameter("derivative_map: grid has no f_LA axis");
  const Axis& axis = along_cols ? grid.cols : grid.rows;
  const std::size_t n = axis.values.size();
  if (n < 3) throw InvalidParameter("derivative_map: need at least 3 points along f_LA");
  const std::size_t lines = along_cols ? grid.rows.values.size() : grid.cols.values.size();

  std::set<std::pair<std::size_t, std::size_t>> flagged;
  for (const auto& f : grid.flags) flagged.insert({f.row, f.col});

  SweepGrid out = grid;
  out.flags.clear();
  out.quantity = "d(" + grid.quantity + ")/d" + std::string(kFrequencyAxis) + " [1/" + axis.unit + "]";
  out.metadata["derivative_of"] = grid.quantity;
  out.metadata["derivative_axis"] = std::string(kFrequencyAxis);

  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
      double x[3], f[3];
      for (int m = 0; m < 3; ++m) {
        x[m] = axis.values[lo + m];
        f[m] = along_cols ? grid.at(line, lo + m) : grid.at(lo + m, line);
      }
      const std::size_t r = along_cols ? line : i;
      const std::size_t c = along_cols ? i : line;
      const double d = lagrange_slope(x, f, static_cast<int>(i - lo));
      if (std::isnan(d)) {
        out.at(r, c) = kNaN;
        out.flags.push_back({r, c, flagged.count({r, c}) ? "flagged_input" : "flagged_neighbor"});
      } else {
        out.at(r, c) = d;
      }
    }
  }
  std::sort(out.flags.begin(), out.flags.end(),
            [](const CellFlag& a, const CellFlag& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  return out;
}

GridFormat parse_grid_format(std::string_view name) {
  if (name == "csv") return GridFormat::Csv;
  if (name == "json") return GridFormat::Json;
  throw InvalidParameter("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf, ptr);
}

std::string grid_to_json(const SweepGrid& grid) {
  grid.validate();
  json values = json::array();
  for (double v : grid.values) values.push_back(std::isnan(v) ? json(nullptr) : json(v));
  json j = {{"format", "nvmpr-grid"},
            {"version", 1},
            {"quantity", grid.quantity},
            {"rows", axis_json(grid.rows)},
            {"cols", axis_json(grid.cols)},
            {"values", values},
            {"flags", flags_json(grid.flags)},
            {"metadata", grid.metadata}};
  return j.dump(1) + "\n";
}

SweepGrid grid_from_json(const std::string& text) {
  SweepGrid g;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "nvmpr-grid") throw IoError("not an nvmpr grid document");
    g.quantity = j.at("quantity").get<std::string>();
    g.rows = axis_from(j.at("rows"));
    g.cols = axis_from(j.at("cols"));
    for (const auto& v : j.at("values")) g.values.push_back(v.is_null() ? kNaN : v.get<double>());
    g.flags = flags_from(j.at("flags"));
    g.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed grid JSON: ") + e.what());
  }
  g.validate();
  return g;
}

std::string grid_to_csv(const SweepGrid& grid) {
  grid.validate();
  std::string out = axis_label(grid.rows) + "\\" + axis_label(grid.cols);
  for (double c : grid.cols.values) out += "," + format_double(c);
  out += "\n";
  for (std::size_t r = 0; r < grid.rows.values.size(); ++r) {
    out += format_double(grid.rows.values[r]);
    for (std::size_t c = 0; c < grid.cols.values.size(); ++c) out += "," + format_double(grid.at(r, c));
    out += "\n";
  }
  return out;
}

SweepGrid grid_from_csv(const std::string& text) {
  SweepGrid g;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV grid");
  auto head = split(line, ',');
  const auto slash = head[0].find('\\');
  if (slash == std::string_view::npos) throw IoError("CSV grid header must start with '<rows>\\<cols>'");
  g.rows = axis_from_label(head[0].substr(0, slash));
  g.cols = axis_from_label(head[0].substr(slash + 1));
  for (std::size_t i = 1; i < head.size(); ++i) g.cols.values.push_back(parse_double(head[i], "CSV header"));
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line, ',');
    const std::string where = "CSV line " + std::to_string(line_no);
    if (cells.size() != head.size()) throw IoError(where + ": expected " + std::to_string(head.size()) + " fields");
    const std::size_t r = g.rows.values.size();
    g.rows.values.push_back(parse_double(cells[0], where));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) {
        g.values.push_back(kNaN);
        g.flags.push_back({r, i - 1, "unknown"});
      } else {
        g.values.push_back(parse_double(cells[i], where));
      }
    }
  }
  return g;
}

void write_grid(const SweepGrid& grid, const std::string& path, GridFormat format) {
  if (format == GridFormat::Json) {
    write_file(path, grid_to_json(grid));
    return;
  }
  write_file(path, grid_to_csv(grid));
  write_file(sidecar_path(path), meta_json(grid).dump(1) + "\n");
}

SweepGrid read_grid(const std::string& path, GridFormat format) {
  if (format == GridFormat::Json) return grid_from_json(read_file(path));
  SweepGrid g = grid_from_csv(read_file(path));
  const std::string side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    try {
      const json j = json::parse(read_file(side));
      g.quantity = j.at("quantity").get<std::string>();
      g.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
      g.flags = flags_from(j.at("flags"));
    } catch (const json::exception& e) {
      throw IoError("malformed sidecar '" + side + "': " + e.what());
    }
  }
  g.validate();
  return g;
}

}  // namespace nvmpr
