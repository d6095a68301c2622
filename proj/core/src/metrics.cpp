#include "riskmesh/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskmesh {

void InfectionTree::add(InfectionEdge e) {
  if (e.child == kNoAgent) throw std::invalid_argument("infection needs a child");
  if (!infected_.insert(e.child).second)
    throw std::logic_error("agent infected twice; reinfection is not modeled");
  if (e.parent != kNoAgent) out_degree_[e.parent] += 1;
  edges_.push_back(e);
}

int InfectionTree::out_degree(AgentId a) const {
  auto it = out_degree_.find(a);
  return it == out_degree_.end() ? 0 : it->second;
}

std::optional<double> estimate_rt(const InfectionTree& tree,
                                  const std::vector<std::pair<AgentId, int>>& course_end_days,
                                  int day, int window_days) {
  if (window_days < 1) throw std::invalid_argument("window must cover at least one day");
  long cohort = 0;
  long children = 0;
  for (const auto& [agent, end_day] : course_end_days) {
    if (end_day < day - window_days || end_day > day) continue;
    cohort += 1;
    children += tree.out_degree(agent);
  }
  if (cohort == 0) return std::nullopt;
  return static_cast<double>(children) / static_cast<double>(cohort);
}

bool is_unimodal(const std::vector<double>& series, int smooth_window) {
  if (series.size() < 3) return true;
  std::vector<double> smooth(series.size());
  int half = std::max(0, smooth_window / 2);
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
    std::size_t hi = std::min(series.size() - 1, i + half);
    double sum = 0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    smooth[i] = sum / static_cast<double>(hi - lo + 1);
  }
  std::size_t peak = static_cast<std::size_t>(
      std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  // Integer wiggle survives a short smooth; only reject dips and rebounds
  // that are large relative to the peak, i.e. a genuine second wave.
  double slack = std::max(1.0, 0.05 * smooth[peak]);
  for (std::size_t i = 1; i <= peak; ++i)
    if (smooth[i] < smooth[i - 1] - slack) return false;
  for (std::size_t i = peak + 1; i < smooth.size(); ++i)
    if (smooth[i] > smooth[i - 1] + slack) return false;
  return true;
}

}  // namespace riskmesh
