#include "g2flow/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "g2flow/errors.hpp"
#include "g2flow/regions.hpp"

namespace g2flow {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double cushion) {
  os << "param,t,s,a,b,da,db,F,H,mean_curvature,alc_chamber,alc_strict,death_quadrant,ac_backward\n";
  const ModelParams& mp = traj.params;
  const double nan = std::nan("");
  for (const auto& smp : traj.samples) {
    U1State arc = smp.state;
    double F = eval_F(arc.a, arc.b, mp).F, H = nan, l = nan;
    ChamberSet ch;
    try {
      arc = to_arc_length(smp.state, mp);
      H = hamiltonian(arc, mp);
      l = mean_curvature(arc, mp);
      ch = chamber_membership(arc, mp, cushion);
    } catch (const Error&) {
      // boundary sample (F = 0 or a degenerate derivative): leave NaN and no flags
    }
    os << fmt17(smp.param) << ',' << fmt17(smp.t) << ',' << fmt17(arc.a) << ',' << fmt17(arc.a)
       << ',' << fmt17(arc.b) << ',' << fmt17(arc.da) << ',' << fmt17(arc.db) << ',' << fmt17(F)
       << ',' << fmt17(H) << ',' << fmt17(l) << ',' << ch.alc_chamber << ',' << ch.alc_strict
       << ',' << ch.death_quadrant << ',' << ch.ac_backward << '\n';
  }
}

void write_full_trajectory_csv(std::ostream& os, const FullTrajectory& traj) {
  os << "t,x1,x2,x3,y1,y2,y3,H,mean_curvature\n";
  const double nan = std::nan("");
  for (const auto& smp : traj.samples) {
    double H = nan, l = nan;
    try {
      H = hamiltonian(smp.state, traj.params);
      l = mean_curvature(smp.state, traj.params);
    } catch (const Error&) {
    }
    os << fmt17(smp.t);
    for (double v : smp.state.x) os << ',' << fmt17(v);
    for (double v : smp.state.y) os << ',' << fmt17(v);
    os << ',' << fmt17(H) << ',' << fmt17(l) << '\n';
  }
}

nlohmann::json events_to_json(const Trajectory& traj) {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : traj.events)
    ev.push_back({{"kind", to_string(e.kind)},
                  {"param", e.param},
                  {"t", e.t},
                  {"a", e.state.a},
                  {"b", e.state.b}});
  return ev;
}

void write_text_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw ConfigError("write failed: " + path);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string gnuplot_ab_script(const std::vector<PlotCurve>& curves, const std::string& output,
                              const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,700\n"
     << "set output '" << output << "'\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'a'\nset ylabel 'b'\nset key outside right\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    os << "  '" << curves[i].csv << "' using 4:5 with " << curves[i].style << " title '"
       << curves[i].title << "'" << (i + 1 < curves.size() ? ", \\\n" : "\n");
  }
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace g2flow
