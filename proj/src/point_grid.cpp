#include "nngibbs/point_grid.hpp"

#include <string>

namespace nngibbs {

PointGrid::PointGrid(double cell_size) : cell_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ParameterError("grid cell size must be positive and finite, got " + std::to_string(cell_size));
  }
}

void PointGrid::insert(const Point2& p) { cells_[key(coord(p.x), coord(p.y))].push_back(p); }

void PointGrid::remove(const Point2& p) {
  auto it = cells_.find(key(coord(p.x), coord(p.y)));
  if (it == cells_.end()) throw MissingPointError("point id " + std::to_string(p.id) + " not in grid");
  auto& bucket = it->second;
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    if (bucket[i].id == p.id) {
      bucket[i] = bucket.back();
      bucket.pop_back();
      if (bucket.empty()) cells_.erase(it);
      return;
    }
  }
  throw MissingPointError("point id " + std::to_string(p.id) + " not in grid");
}

bool PointGrid::any_closer_than(double x, double y, double r, PointId exclude) const {
  bool found = false;
  const double r2 = r * r;
  for_each_within(x, y, r, [&](const Point2& q, double d2) {
    if (q.id != exclude && d2 < r2) found = true;
  });
  return found;
}

}  // namespace nngibbs
