#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nvmpr/config.hpp"
#include "nvmpr/sweep_grid.hpp"

namespace nvmpr {

using Cell = std::variant<std::string, double, long long, bool>;

// Tabular result of the non-sweep subcommands: a few scalar results plus an
// optional table.
struct Report {
  Mode mode = Mode::Transitions;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, std::string> metadata;
  bool numerically_ok = true;  // false: non-convergence or failed check
};

std::string report_to_json(const Report& report);
std::string report_to_csv(const Report& report);
void write_report(const Report& report, const std::string& path, GridFormat format);

// P_z / P_zs at one (B_S [mT], f_LA [MHz]) cell. Throws on cell-level failure.
double sweep_cell(const SweepConfig& config, double B_mT, double f_MHz);

// Order l selected for a cell (minimal |beta_al|).
int dominant_order(const SweepConfig& config, double B_mT, double f_MHz);

// Rows are B_S (mT), columns f_LA (MHz). Cells that fail are NaN and flagged.
// The result does not depend on `threads`.
SweepGrid run_sweep(const RunConfig& config, int threads = 1);

Report run_transitions(const RunConfig& config);
Report run_atlas(const RunConfig& config);
Report run_ode_check(const RunConfig& config);
Report run_coupling(const RunConfig& config);

}  // namespace nvmpr
