#ifndef NNGIBBS_PREDICATES_HPP
#define NNGIBBS_PREDICATES_HPP

#include "nngibbs/types.hpp"

namespace nngibbs::predicates {

// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise,
// -1 clockwise, 0 collinear. Exact: a floating-point filter with a GMP
// rational fallback when the filter cannot certify the sign.
int orient(double ax, double ay, double bx, double by, double cx, double cy);

inline int orient(const Point2& a, const Point2& b, const Point2& c) {
  return orient(a.x, a.y, b.x, b.y, c.x, c.y);
}

// Sign of the in-circle determinant: +1 when d lies strictly inside the circle
// through counter-clockwise a, b, c, -1 strictly outside, 0 cocircular. Exact.
int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

// In-circle with symbolic perturbation of the paraboloid lift. Each point's
// lift is raised by an infinitesimal that grows with its id, which breaks
// cocircular ties deterministically. Requires a, b, c counter-clockwise and
// the four ids distinct. Never returns 0.
int incircle_perturbed(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

// Number of calls that fell through to exact arithmetic (test instrumentation).
long long exact_fallback_count();

}  // namespace nngibbs::predicates

#endif  // NNGIBBS_PREDICATES_HPP
