#pragma once

#include <filesystem>
#include <string>

#include "tetra/cli/config.hpp"

namespace tetra::cli {

// shortest round-trip decimal, dot separator, independent of the locale
std::string format_number(double v);

// finite doubles as numbers; inf and nan as strings so they survive a round trip
json number(double v);

json to_json(const Chord& chord);
json to_json(const ChordSearchReport& report);
json to_json(const ScenarioReport& report);
json to_json(const Pb4Report& report);

// header t,<coordinate labels>; one row per recorded state
std::string trajectory_csv(const Trajectory& trajectory);
// "# t |p|" then two columns
std::string norm_plot_data(const Trajectory& trajectory);
// header i,j,u,s,value in node order
std::string grid_csv(const GridWindow& window, const GridField& field);
// "# s u" ridge of the bracket: for each s row, the u where F_u G_s - F_s G_u peaks
std::string bracket_ridge_plot_data(const GridWindow& window, const GridField& f, const GridField& g);

// write with path context in the error; JSON is UTF-8 with sorted keys
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& doc);

}  // namespace tetra::cli
