#include "drlab/envs/heatmap.hpp"

#include <sstream>

namespace drlab {

std::string Heatmap::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << row[j];
    }
    out << "\n";
  }
  return out.str();
}

Heatmap export_heatmap(const HStructure& h, const PointReachConfig& config,
                       const Actor& policy) {
  const PointReachEnv env(config);
  Heatmap map;
  const double cell = config.grid_size / 10.0;
  for (std::size_t i = 0; i < 10; ++i) {    // rows: y, bottom to top
    for (std::size_t j = 0; j < 10; ++j) {  // columns: x, left to right
      const std::array<double, 2> center = {
          (static_cast<double>(j) + 0.5) * cell,
          (static_cast<double>(i) + 0.5) * cell,
      };
      const std::vector<double> state = env.features(center);
      const std::vector<double> action = policy.act(state, 0.0);
      std::vector<double> input = state;
      input.insert(input.end(), action.begin(), action.end());
      map.cells[i][j] = h.nets()[0].forward_scalar(input);
    }
  }
  return map;
}

}  // namespace drlab
