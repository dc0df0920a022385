#include "nngibbs/types.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

namespace nngibbs {

void validate_window(const Window& w) {
  if (!std::isfinite(w.xmin) || !std::isfinite(w.xmax) || !std::isfinite(w.ymin) || !std::isfinite(w.ymax)) {
    throw ParameterError("window bounds must be finite");
  }
  if (!(w.xmin < w.xmax) || !(w.ymin < w.ymax)) {
    throw ParameterError("window requires xmin < xmax and ymin < ymax");
  }
}

Configuration make_configuration(const std::vector<std::pair<double, double>>& xy, const Window& window) {
  Configuration c;
  c.window = window;
  c.points.reserve(xy.size());
  PointId id = 0;
  for (const auto& [x, y] : xy) c.points.push_back({x, y, id++});
  return c;
}

void validate_configuration(const Configuration& config) {
  validate_window(config.window);
  std::unordered_set<PointId> ids;
  std::set<std::pair<double, double>> coords;
  for (const auto& p : config.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParameterError("point coordinates must be finite");
    if (!config.window.contains(p)) throw ValidationError("point " + std::to_string(p.id) + " lies outside the window");
    if (!ids.insert(p.id).second) throw DuplicatePointError("duplicate point id " + std::to_string(p.id));
    if (!coords.insert({p.x, p.y}).second) throw DuplicatePointError("duplicate point coordinates");
  }
}

}  // namespace nngibbs
