#include "nngibbs/predicates.hpp"

#include <atomic>
#include <cmath>
#include <gmpxx.h>

namespace nngibbs::predicates {
namespace {

constexpr double kEpsilon = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
constexpr double kIncircleBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

std::atomic<long long> fallback_counter{0};

int sign_of(const mpq_class& v) { return sgn(v); }

int orient_exact(double ax, double ay, double bx, double by, double cx, double cy) {
  const mpq_class acx = mpq_class(ax) - mpq_class(cx);
  const mpq_class bcx = mpq_class(bx) - mpq_class(cx);
  const mpq_class acy = mpq_class(ay) - mpq_class(cy);
  const mpq_class bcy = mpq_class(by) - mpq_class(cy);
  return sign_of(acx * bcy - acy * bcx);
}

int incircle_exact(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const mpq_class dx(d.x), dy(d.y);
  const mpq_class adx = mpq_class(a.x) - dx, ady = mpq_class(a.y) - dy;
  const mpq_class bdx = mpq_class(b.x) - dx, bdy = mpq_class(b.y) - dy;
  const mpq_class cdx = mpq_class(c.x) - dx, cdy = mpq_class(c.y) - dy;
  const mpq_class alift = adx * adx + ady * ady;
  const mpq_class blift = bdx * bdx + bdy * bdy;
  const mpq_class clift = cdx * cdx + cdy * cdy;
  const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

}  // namespace

int orient(double ax, double ay, double bx, double by, double cx, double cy) {
  const double detleft = (ax - cx) * (by - cy);
  const double detright = (ay - cy) * (bx - cx);
  const double det = detleft - detright;
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  }
  const double bound = kOrientBound * detsum;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  fallback_counter.fetch_add(1, std::memory_order_relaxed);
  return orient_exact(ax, ay, bx, by, cx, cy);
}

int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  fallback_counter.fetch_add(1, std::memory_order_relaxed);
  return incircle_exact(a, b, c, d);
}

int incircle_perturbed(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int s = incircle(a, b, c, d);
  if (s != 0) return s;
  // Cocircular: the leading perturbation term belongs to the largest id. Any
  // three of four distinct cocircular points are non-collinear, so the
  // cofactor orientation below is never zero.
  PointId top = a.id;
  int which = 0;
  if (b.id > top) { top = b.id; which = 1; }
  if (c.id > top) { top = c.id; which = 2; }
  if (d.id > top) { which = 3; }
  switch (which) {
    case 0: return orient(d, b, c);
    case 1: return orient(a, d, c);
    case 2: return orient(a, b, d);
    default: return -1;
  }
}

long long exact_fallback_count() { return fallback_counter.load(std::memory_order_relaxed); }

}  // namespace nngibbs::predicates
