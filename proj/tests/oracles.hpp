#ifndef NNGIBBS_TESTS_ORACLES_HPP
#define NNGIBBS_TESTS_ORACLES_HPP

// Brute-force references used only by tests. None of these go through the
// incremental triangulation.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nngibbs/predicates.hpp"
#include "nngibbs/rng.hpp"
#include "nngibbs/triangulation.hpp"
#include "nngibbs/types.hpp"

namespace oracle {

using nngibbs::Point2;
using nngibbs::PointId;
using nngibbs::TriangleIds;

inline TriangleIds canonical(TriangleIds t) {
  std::sort(t.begin(), t.end());
  return t;
}

inline std::set<TriangleIds> canonical_set(const std::vector<TriangleIds>& tris) {
  std::set<TriangleIds> out;
  for (const auto& t : tris) out.insert(canonical(t));
  return out;
}

// Every non-collinear triple whose circumcircle is empty under the given in-circle predicate.
template <typename InCircle>
std::set<TriangleIds> delaunay_triples(const std::vector<Point2>& pts, InCircle incircle) {
  std::set<TriangleIds> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Point2 a = pts[i], b = pts[j], c = pts[k];
        const int o = nngibbs::predicates::orient(a, b, c);
        if (o == 0) continue;
        if (o < 0) std::swap(b, c);
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          if (incircle(a, b, c, pts[m]) >= 0) empty = false;
        }
        if (empty) out.insert(canonical({a.id, b.id, c.id}));
      }
    }
  }
  return out;
}

// Unperturbed exact oracle; valid for points in general position.
inline std::set<TriangleIds> delaunay_generic(const std::vector<Point2>& pts) {
  return delaunay_triples(pts, [](const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    return nngibbs::predicates::incircle(a, b, c, d);
  });
}

// Oracle under the same id-ordered symbolic perturbation; valid for any distinct points.
inline std::set<TriangleIds> delaunay_perturbed(const std::vector<Point2>& pts) {
  return delaunay_triples(pts, [](const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    return nngibbs::predicates::incircle_perturbed(a, b, c, d);
  });
}

inline double min_angle_of(const std::vector<Point2>& pts, const TriangleIds& t) {
  std::map<PointId, Point2> by_id;
  for (const auto& p : pts) by_id[p.id] = p;
  return nngibbs::min_angle(by_id.at(t[0]), by_id.at(t[1]), by_id.at(t[2]));
}

using EdgeKey = std::pair<PointId, PointId>;

// Beta-edges by filtering the brute-force triangle list. The angle test is
// the same sine/cosine comparison the library uses, so ties resolve alike.
inline std::set<EdgeKey> beta_edges_of(const std::vector<Point2>& pts, const std::set<TriangleIds>& tris,
                                       double beta0) {
  std::map<PointId, Point2> by_id;
  for (const auto& p : pts) by_id[p.id] = p;
  const nngibbs::BetaThreshold beta(beta0);
  std::set<EdgeKey> out;
  for (const auto& t : tris) {
    Point2 a = by_id.at(t[0]), b = by_id.at(t[1]), c = by_id.at(t[2]);
    if (nngibbs::predicates::orient(a, b, c) < 0) std::swap(b, c);
    if (!beta.accepts(a, b, c)) continue;
    out.insert({t[0], t[1]});
    out.insert({t[0], t[2]});
    out.insert({t[1], t[2]});
  }
  return out;
}

inline std::set<EdgeKey> edge_keys(const std::vector<nngibbs::Edge>& edges) {
  std::set<EdgeKey> out;
  for (const auto& e : edges) out.insert({e.a, e.b});
  return out;
}

// Sufficient statistics by brute force: Delaunay by triple enumeration and
// complete-graph counts by a double loop.
inline std::vector<double> brute_stats(const std::vector<Point2>& pts, const std::string& graph, double beta0,
                                       const std::vector<double>& d) {
  std::vector<double> u(d.size(), 0.0);
  u[0] = static_cast<double>(pts.size());
  auto bin = [&](double len) {
    for (std::size_t i = 1; i < d.size(); ++i)
      if (len > d[i - 1] && len <= d[i]) return int(i);
    return -1;
  };
  std::map<PointId, Point2> by_id;
  for (const auto& p : pts) by_id[p.id] = p;
  auto len = [&](PointId a, PointId b) {
    const double dx = by_id[a].x - by_id[b].x, dy = by_id[a].y - by_id[b].y;
    return std::sqrt(dx * dx + dy * dy);
  };
  if (graph == "complete") {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const int b = bin(len(pts[i].id, pts[j].id));
        if (b > 0) u[b] += 1.0;
      }
  } else if (graph == "beta-delaunay") {
    for (const auto& e : beta_edges_of(pts, delaunay_generic(pts), beta0)) {
      const int b = bin(len(e.first, e.second));
      if (b > 0) u[b] += 1.0;
    }
  }
  return u;
}

inline std::vector<Point2> uniform_points(nngibbs::Rng& rng, std::size_t n, double lo, double hi, PointId first_id = 0) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi), first_id + static_cast<PointId>(i)});
  return pts;
}

// Coordinates on a dyadic grid of spacing 2^-10, so integer translations are exact.
inline std::vector<Point2> dyadic_points(nngibbs::Rng& rng, std::size_t n, double lo, double hi, PointId first_id = 0) {
  std::vector<Point2> pts;
  std::set<std::pair<double, double>> seen;
  while (pts.size() < n) {
    const double x = std::floor(rng.uniform(lo, hi) * 1024.0) / 1024.0;
    const double y = std::floor(rng.uniform(lo, hi) * 1024.0) / 1024.0;
    if (!seen.insert({x, y}).second) continue;
    pts.push_back({x, y, first_id + static_cast<PointId>(pts.size())});
  }
  return pts;
}

}  // namespace oracle

#endif  // NNGIBBS_TESTS_ORACLES_HPP
