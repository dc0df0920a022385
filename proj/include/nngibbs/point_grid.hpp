#ifndef NNGIBBS_POINT_GRID_HPP
#define NNGIBBS_POINT_GRID_HPP

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nngibbs/types.hpp"

namespace nngibbs {

// Uniform hash grid for fixed-radius neighbour queries.
class PointGrid {
 public:
  explicit PointGrid(double cell_size);

  void insert(const Point2& p);
  // Removes the point with this id stored at p's position.
  void remove(const Point2& p);
  void clear() { cells_.clear(); }
  double cell_size() const { return cell_; }

  // Calls f(q, squared distance) for every stored q with |q - (x, y)| <= r.
  template <typename F>
  void for_each_within(double x, double y, double r, F f) const {
    const std::int64_t cx0 = coord(x - r), cx1 = coord(x + r);
    const std::int64_t cy0 = coord(y - r), cy1 = coord(y + r);
    const double r2 = r * r;
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
      for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
        auto it = cells_.find(key(cx, cy));
        if (it == cells_.end()) continue;
        for (const auto& q : it->second) {
          const double dx = q.x - x, dy = q.y - y;
          const double d2 = dx * dx + dy * dy;
          if (d2 <= r2) f(q, d2);
        }
      }
    }
  }

  // True when some stored point other than `exclude` lies strictly closer than r.
  bool any_closer_than(double x, double y, double r, PointId exclude) const;

 private:
  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<Point2>> cells_;
};

}  // namespace nngibbs

#endif  // NNGIBBS_POINT_GRID_HPP
