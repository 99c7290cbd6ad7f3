#include "drlab/run/rap.hpp"

#include <stdexcept>

namespace drlab {

double relative_average_performance(const std::vector<double>& returns,
                                    const std::vector<double>& oracle_returns,
                                    const std::vector<bool>& offset_task, double offset) {
  if (returns.empty()) throw std::invalid_argument("relative performance: no tasks");
  if (returns.size() != oracle_returns.size() || returns.size() != offset_task.size()) {
    throw std::invalid_argument("relative performance: task lists differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const double shift = offset_task[i] ? offset : 0.0;
    const double denom = oracle_returns[i] + shift;
    if (denom == 0.0) {
      throw std::invalid_argument("relative performance: zero denominator at task " +
                                  std::to_string(i));
    }
    sum += (returns[i] + shift) / denom;
  }
  return sum / static_cast<double>(returns.size());
}

}  // namespace drlab
