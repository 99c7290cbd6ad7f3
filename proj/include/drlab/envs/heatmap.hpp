#pragma once

#include <array>
#include <string>

#include "drlab/approx/hc.hpp"
#include "drlab/envs/point_reach.hpp"

namespace drlab {

// 10 x 10 grid of single-step critic values over the arena. cells[i][j]
// holds row i (counted bottom to top) and column j (left to right); the
// CSV has no header — ten comma-separated rows, bottom row first.
struct Heatmap {
  std::array<std::array<double, 10>, 10> cells{};

  std::string to_csv() const;
};

// Evaluates the additive structure's single-step net at every cell center
// of the arena, with the action the policy takes there at the start of an
// interval (phase 0). States are feature-scaled exactly as in training.
Heatmap export_heatmap(const HStructure& h, const PointReachConfig& config,
                       const Actor& policy);

}  // namespace drlab
