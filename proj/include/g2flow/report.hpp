#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2flow/flow.hpp"

namespace g2flow {

// %.17g, round-trip exact for binary64.
std::string fmt17(double v);

// Columns: param, t, s, a, b, da, db, F, H, mean_curvature and one 0/1 flag per chamber.
// da, db are given in arc-length gauge whatever the trajectory parametrization.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double cushion = 1e-9);
void write_full_trajectory_csv(std::ostream& os, const FullTrajectory& traj);

nlohmann::json events_to_json(const Trajectory& traj);

// Writes text to a file, creating parent directories. Throws ConfigError on failure.
void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const nlohmann::json& j);

struct PlotCurve {
  std::string csv;    // file name relative to the script
  std::string title;
  std::string style;  // gnuplot "with" clause
};

// Plots b against a (columns 4 and 5 of the trajectory CSV).
std::string gnuplot_ab_script(const std::vector<PlotCurve>& curves, const std::string& output,
                              const std::string& title);

// FNV-1a 64-bit, hex.
std::string fnv1a_hex(const std::string& text);

}  // namespace g2flow
