#pragma once

#include <cmath>
#include <vector>

#include "lrfbench/scoring.hpp"

namespace lrfbench::testing {

// Replay of an externally published large-scale benchmark: twelve calibrated
// submissions (four algorithm families at three schedule-horizon settings)
// timed against eight deep-learning workloads. Fractions of the per-workload
// step budget, printed at three decimals; U marks an unreached target.
//
// The publication marks each column's fastest entry. One column prints a
// display tie (two cells rounding to 0.303) with the marker on only one of
// them; transcription keeps the marked cell as the strict minimum by placing
// the unmarked twin half a display quantum higher, inside its own rounding
// interval. Reached counts are unaffected.
inline TimeTable published_timetable() {
  constexpr double U = kUnreached;
  struct Cell {
    double value;
    bool marked;
  };
  const std::vector<std::string> rows = {
      "adamw_33",  "nadamw_66",   "prodigy_66", "mechanic_33", "prodigy_50", "nadamw_50",
      "mechanic_50", "mechanic_66", "nadamw_33",  "adamw_66",    "prodigy_33", "adamw_50"};
  const std::vector<std::string> cols = {"criteo", "fastmri",    "resnet", "vit",
                                         "conformer", "deepspeech", "ogbg",   "wmt"};
  const std::vector<std::vector<Cell>> cells = {
      {{0.284, true}, {U, false}, {U, false}, {0.303, false}, {0.245, false}, {0.291, false}, {U, false}, {U, false}},
      {{0.429, false}, {U, false}, {0.782, false}, {0.609, false}, {0.435, false}, {0.501, false}, {U, false}, {U, false}},
      {{0.470, false}, {U, false}, {0.773, false}, {0.521, false}, {0.491, false}, {0.500, false}, {U, false}, {U, false}},
      {{U, false}, {0.130, true}, {U, false}, {0.335, false}, {0.248, false}, {0.303, false}, {U, false}, {U, false}},
      {{0.388, false}, {U, false}, {0.577, true}, {0.404, false}, {U, false}, {0.381, false}, {U, false}, {U, false}},
      {{0.335, false}, {U, false}, {U, false}, {U, false}, {0.369, false}, {0.412, false}, {U, false}, {0.457, true}},
      {{0.382, false}, {U, false}, {U, false}, {0.412, false}, {0.375, false}, {0.374, false}, {U, false}, {U, false}},
      {{0.427, false}, {U, false}, {U, false}, {0.608, false}, {0.436, false}, {0.478, false}, {U, false}, {U, false}},
      {{0.320, false}, {U, false}, {U, false}, {0.303, true}, {U, false}, {0.286, true}, {U, false}, {U, false}},
      {{0.511, false}, {U, false}, {U, false}, {U, false}, {0.419, false}, {0.518, false}, {U, false}, {U, false}},
      {{U, false}, {U, false}, {U, false}, {U, false}, {0.242, true}, {0.317, false}, {U, false}, {U, false}},
      {{0.489, false}, {0.229, false}, {U, false}, {U, false}, {U, false}, {0.492, false}, {U, false}, {U, false}}};

  TimeTable table;
  table.rows = rows;
  table.cols = cols;
  table.times.assign(rows.size(), std::vector<double>(cols.size(), U));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    double marked_value = U;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (cells[r][c].marked) marked_value = cells[r][c].value;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double v = cells[r][c].value;
      if (std::isfinite(v) && !cells[r][c].marked && v == marked_value) v += 0.0005;
      table.times[r][c] = v;
    }
  }
  return table;
}

// The same pool with the published schedule-free submission appended.
inline TimeTable published_timetable_with_schedule_free() {
  TimeTable table = published_timetable();
  constexpr double U = kUnreached;
  table.rows.push_back("schedule_free_adamw");
  table.times.push_back({0.249, 0.050, U, 0.225, 0.322, 0.294, 0.108, 0.314});
  return table;
}

}  // namespace lrfbench::testing
