#pragma once

// File emission for the driver: trace CSV (and its parser), equilibrium CSV,
// compare table, and hand-written SVG semilog plots.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fpflow/equilibrium.hpp"
#include "fpflow/solver.hpp"

namespace fpflow::cli {

/// Shortest representation that round-trips, '.' decimal separator.
std::string format_double(double v);

inline constexpr std::string_view kTraceHeader = "t,mass,F,F_rel,D_dis,f_min,f_max";

std::string trace_csv(const EnergyTrace& trace);
/// Throws std::runtime_error on a malformed document.
EnergyTrace parse_trace_csv(std::string_view text);

/// Cell-center coordinates, f_eq, then "# C1=<v> F_eq=<v>".
std::string equilibrium_csv(const EquilibriumState& eq);

struct CompareRow {
  std::string name;
  double rate;
  double r_squared;
};
std::string compare_csv(const std::vector<CompareRow>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-positive values are skipped on the log axis
};

/// Line plot with a linear x axis and a log10 y axis.
std::string semilog_svg(const std::vector<PlotSeries>& series, std::string_view title,
                        std::string_view x_label, std::string_view y_label);

PlotSeries free_energy_series(const EnergyTrace& trace, std::string label);

/// Writes through a temporary file and a rename so readers never see a
/// partial file.  Throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace fpflow::cli
