#pragma once

#include <span>
#include <string>
#include <vector>

#include "faultsim/geometry.hpp"

namespace faultsim::scenario {

struct SlipEvent {
  int onset = 0, peak = 0, end = 0;  // sample indices, end inclusive
  double t_onset = 0, t_peak = 0, t_end = 0;
  double peak_value = 0;
};

// Maximal runs with value > factor * v_D, runs separated by less than
// merge_gap seconds joined.
std::vector<SlipEvent> detect_slip_events(std::span<const double> t, std::span<const double> v,
                                          double v_D, double factor = 10.0,
                                          double merge_gap = 0.05);

// Field sampled on a fixed grid: value(j, i) at (x[i], t[j]).
struct GridField {
  std::vector<double> x, t;
  std::vector<double> values;  // row-major in t
  double at(int j, int i) const { return values[static_cast<std::size_t>(j) * x.size() + i]; }
};

// Polylines in (x, t) for one level.
using Polyline = std::vector<Vec2>;
std::vector<Polyline> level_lines(const GridField &f, double level);

// One block per level: "# level <value m/s>" then polylines as "x t" rows,
// separated by blank lines.
void write_level_lines(const GridField &f, std::span<const double> levels, const std::string &path);

}  // namespace faultsim::scenario
