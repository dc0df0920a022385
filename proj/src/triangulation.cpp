#include "nngibbs/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nngibbs/predicates.hpp"

namespace nngibbs {

using predicates::incircle_perturbed;
using predicates::orient;

BetaThreshold::BetaThreshold(double beta0) : beta0_(beta0), cos_(std::cos(beta0)), sin_(std::sin(beta0)) {
  if (!(beta0 > 0.0) || beta0 > std::numbers::pi / 3.0 + 1e-15) {
    throw ParameterError("beta0 must lie in (0, pi/3], got " + std::to_string(beta0));
  }
}

bool BetaThreshold::accepts(const Point2& a, const Point2& b, const Point2& c) const {
  // angle(u, v) > beta0  <=>  sin(angle - beta0) > 0  <=>  cross*cos - dot*sin > 0
  auto exceeds = [this](const Point2& o, const Point2& p, const Point2& q) {
    const double ux = p.x - o.x, uy = p.y - o.y;
    const double vx = q.x - o.x, vy = q.y - o.y;
    const double cross = ux * vy - uy * vx;
    const double dot = ux * vx + uy * vy;
    return cross * cos_ - dot * sin_ > 0.0;
  };
  return exceeds(a, b, c) && exceeds(b, c, a) && exceeds(c, a, b);
}

double min_angle(const Point2& a, const Point2& b, const Point2& c) {
  auto angle = [](const Point2& o, const Point2& p, const Point2& q) {
    const double ux = p.x - o.x, uy = p.y - o.y;
    const double vx = q.x - o.x, vy = q.y - o.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

double circumdiameter(const Point2& a, const Point2& b, const Point2& c) {
  const double ab = std::sqrt(squared_distance(a, b));
  const double bc = std::sqrt(squared_distance(b, c));
  const double ca = std::sqrt(squared_distance(c, a));
  const double twice_area = std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  return ab * bc * ca / twice_area;
}

Triangulation::Triangulation() {
  verts_.push_back(Vertex{Point2{0.0, 0.0, -1}, -1, true});
}

Triangulation::Triangulation(const Window& locator_extent) : Triangulation() {
  validate_window(locator_extent);
  extent_ = locator_extent;
  grid_n_ = 64;
  buckets_.assign(static_cast<std::size_t>(grid_n_) * grid_n_, -1);
}

Triangulation Triangulation::build(const Configuration& config) {
  Triangulation tri(config.window);
  for (const auto& p : config.points) tri.insert(p);
  return tri;
}

std::size_t Triangulation::bucket_of(double x, double y) const {
  const auto& w = *extent_;
  auto cell = [this](double v, double lo, double span) {
    const double f = (v - lo) / span * grid_n_;
    int i = f < 0.0 ? 0 : (f >= grid_n_ ? grid_n_ - 1 : static_cast<int>(f));
    return i;
  };
  const int ix = cell(x, w.xmin, w.width());
  const int iy = cell(y, w.ymin, w.height());
  return static_cast<std::size_t>(iy) * grid_n_ + ix;
}

void Triangulation::bucket_note(int vslot) {
  if (!extent_) return;
  buckets_[bucket_of(verts_[vslot].p.x, verts_[vslot].p.y)] = vslot;
}

int Triangulation::index_in(int t, int vertex) const {
  const auto& v = tris_[t].v;
  if (v[0] == vertex) return 0;
  if (v[1] == vertex) return 1;
  if (v[2] == vertex) return 2;
  return -1;
}

TriangleIds Triangulation::ids_of(int t) const {
  const auto& v = tris_[t].v;
  return {verts_[v[0]].p.id, verts_[v[1]].p.id, verts_[v[2]].p.id};
}

bool Triangulation::conflicts(int t, const Point2& q) const {
  const auto& v = tris_[t].v;
  const int k = index_in(t, kInfinite);
  if (k < 0) return incircle_perturbed(verts_[v[0]].p, verts_[v[1]].p, verts_[v[2]].p, q) > 0;
  // Ghost (a, b, inf): the exterior lies to the left of a -> b.
  const Point2& a = verts_[v[(k + 1) % 3]].p;
  const Point2& b = verts_[v[(k + 2) % 3]].p;
  const int o = orient(a, b, q);
  if (o != 0) return o > 0;
  const double dot = (q.x - a.x) * (b.x - a.x) + (q.y - a.y) * (b.y - a.y);
  const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  return dot > 0.0 && dot < len2;
}

bool Triangulation::triangle_beta(int t, const BetaThreshold& beta) const {
  if (is_ghost(t)) return false;
  const auto& v = tris_[t].v;
  return beta.accepts(verts_[v[0]].p, verts_[v[1]].p, verts_[v[2]].p);
}

int Triangulation::new_vertex(const Point2& p) {
  int slot;
  if (!free_verts_.empty()) {
    slot = free_verts_.back();
    free_verts_.pop_back();
  } else {
    slot = static_cast<int>(verts_.size());
    verts_.emplace_back();
  }
  verts_[slot] = Vertex{p, -1, true};
  id_to_slot_[p.id] = slot;
  return slot;
}

int Triangulation::new_triangle(int a, int b, int c) {
  int t;
  if (!free_tris_.empty()) {
    t = free_tris_.back();
    free_tris_.pop_back();
  } else {
    t = static_cast<int>(tris_.size());
    tris_.emplace_back();
  }
  tris_[t].v = {a, b, c};
  tris_[t].n = {-1, -1, -1};
  tris_[t].alive = true;
  if (!is_ghost(t)) ++solid_count_;
  return t;
}

void Triangulation::free_triangle(int t) {
  if (!is_ghost(t)) --solid_count_;
  tris_[t].alive = false;
  free_tris_.push_back(t);
}

int Triangulation::any_solid_triangle() const {
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (tris_[t].alive && !is_ghost(t)) return t;
  }
  return -1;
}

int Triangulation::start_triangle(const Point2& q, int hint) const {
  int t = -1;
  if (extent_) {
    const int b = buckets_[bucket_of(q.x, q.y)];
    if (b > 0 && verts_[b].alive && verts_[b].tri >= 0) t = verts_[b].tri;
  }
  if (t < 0 || !tris_[t].alive) t = hint;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = last_tri_;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = any_solid_triangle();
  if (t >= 0 && is_ghost(t)) t = tris_[t].n[index_in(t, kInfinite)];
  return t;
}

int Triangulation::locate(const Point2& q, int hint) const {
  int t = start_triangle(q, hint);
  if (t < 0) return -1;
  const std::size_t limit = 4 * tris_.size() + 64;
  unsigned rotation = 0;
  for (std::size_t steps = 0; steps < limit; ++steps) {
    if (is_ghost(t)) return t;
    const auto& tr = tris_[t];
    int next = -1;
    const unsigned offset = rotation++ % 3;
    for (unsigned k = 0; k < 3; ++k) {
      const unsigned i = (offset + k) % 3;
      const Point2& a = verts_[tr.v[(i + 1) % 3]].p;
      const Point2& b = verts_[tr.v[(i + 2) % 3]].p;
      if (orient(a, b, q) < 0) {
        next = tr.n[i];
        break;
      }
    }
    if (next < 0) return t;
    t = next;
  }
  // Walk did not settle; scan exhaustively.
  int ghost_hit = -1;
  for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
    if (!tris_[s].alive) continue;
    if (is_ghost(s)) {
      const int k = index_in(s, kInfinite);
      const auto& v = tris_[s].v;
      if (orient(verts_[v[(k + 1) % 3]].p, verts_[v[(k + 2) % 3]].p, q) > 0) ghost_hit = s;
      continue;
    }
    const auto& v = tris_[s].v;
    if (orient(verts_[v[0]].p, verts_[v[1]].p, q) >= 0 && orient(verts_[v[1]].p, verts_[v[2]].p, q) >= 0 &&
        orient(verts_[v[2]].p, verts_[v[0]].p, q) >= 0) {
      return s;
    }
  }
  return ghost_hit;
}

void Triangulation::check_not_duplicate(int t, const Point2& q) const {
  for (int slot : tris_[t].v) {
    if (slot == kInfinite) continue;
    const Point2& p = verts_[slot].p;
    if (p.x == q.x && p.y == q.y) {
      throw DuplicatePointError("point (" + std::to_string(q.x) + ", " + std::to_string(q.y) +
                                ") coincides with existing point id " + std::to_string(p.id));
    }
  }
}

void Triangulation::collect_cavity(const Point2& q, int start, QueryContext& ctx) const {
  if (ctx.stamp.size() < tris_.size()) ctx.stamp.resize(tris_.size(), 0);
  ctx.generation += 2;
  if (ctx.generation < 2) {
    std::fill(ctx.stamp.begin(), ctx.stamp.end(), 0);
    ctx.generation = 2;
  }
  const std::uint32_t inside = ctx.generation;
  const std::uint32_t outside = ctx.generation + 1;
  ctx.cavity.clear();
  ctx.boundary.clear();
  ctx.stack.clear();
  ctx.stack.push_back(start);
  ctx.stamp[start] = inside;
  while (!ctx.stack.empty()) {
    const int t = ctx.stack.back();
    ctx.stack.pop_back();
    ctx.cavity.push_back(t);
    const auto& tr = tris_[t];
    for (int i = 0; i < 3; ++i) {
      const int nb = tr.n[i];
      const std::uint32_t s = ctx.stamp[nb];
      if (s == inside) continue;
      if (s != outside) {
        if (conflicts(nb, q)) {
          ctx.stamp[nb] = inside;
          ctx.stack.push_back(nb);
          continue;
        }
        ctx.stamp[nb] = outside;
      }
      ctx.boundary.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb});
    }
  }
}

void Triangulation::stitch(const std::vector<int>& fresh, const std::vector<HalfEdge>& outer) {
  std::vector<HalfEdge> open;
  open.reserve(fresh.size() * 3);
  for (int t : fresh) {
    for (int i = 0; i < 3; ++i) {
      open.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], t, i});
    }
  }
  auto key_less = [](const HalfEdge& a, const HalfEdge& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  };
  std::vector<HalfEdge> pool = open;
  pool.insert(pool.end(), outer.begin(), outer.end());
  std::sort(pool.begin(), pool.end(), key_less);
  for (const auto& h : open) {
    const HalfEdge probe{h.to, h.from, -1, -1};
    auto it = std::lower_bound(pool.begin(), pool.end(), probe, key_less);
    if (it == pool.end() || it->from != h.to || it->to != h.from) {
      throw Error("triangulation stitch failed: unmatched half-edge");
    }
    tris_[h.tri].n[h.index] = it->tri;
    tris_[it->tri].n[it->index] = h.tri;
  }
}

void Triangulation::insert(const Point2& p, ChangeRecord* record) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParameterError("point coordinates must be finite");
  if (id_to_slot_.count(p.id)) throw DuplicatePointError("point id " + std::to_string(p.id) + " already present");
  if (record) {
    record->created.clear();
    record->destroyed.clear();
  }
  if (!planar_) {
    int first = -1, second = -1;
    for (int s = 1; s < static_cast<int>(verts_.size()); ++s) {
      if (!verts_[s].alive) continue;
      if (verts_[s].p.x == p.x && verts_[s].p.y == p.y) {
        throw DuplicatePointError("point coincides with existing point id " + std::to_string(verts_[s].p.id));
      }
      if (first < 0) first = s;
      else if (second < 0) second = s;
    }
    const int slot = new_vertex(p);
    bucket_note(slot);
    if (second >= 0 && orient(verts_[first].p, verts_[second].p, p) != 0) enter_planar_mode(record);
    return;
  }
  const int t = locate(p, last_tri_);
  check_not_duplicate(t, p);
  const int slot = new_vertex(p);
  insert_slot(slot, record, t);
  bucket_note(slot);
}

void Triangulation::insert_slot(int vslot, ChangeRecord* record, int located) {
  const Point2& q = verts_[vslot].p;
  int t = located;
  if (t < 0) {
    t = locate(q, last_tri_);
    check_not_duplicate(t, q);
  }
  QueryContext& ctx = own_ctx_;
  collect_cavity(q, t, ctx);
  for (int c : ctx.cavity) {
    if (record && !is_ghost(c)) record->destroyed.push_back(ids_of(c));
    free_triangle(c);
  }
  // Boundary edge (u -> w) becomes triangle (u, w, q).
  std::vector<int> fresh;
  fresh.reserve(ctx.boundary.size());
  std::vector<std::pair<int, int>> by_from;
  by_from.reserve(ctx.boundary.size());
  for (const auto& e : ctx.boundary) {
    const int nt = new_triangle(e.from, e.to, vslot);
    fresh.push_back(nt);
    by_from.emplace_back(e.from, nt);
    tris_[nt].n[2] = e.outer;
    auto& ov = tris_[e.outer];
    for (int k = 0; k < 3; ++k) {
      if (ov.v[k] != e.from && ov.v[k] != e.to) ov.n[k] = nt;
    }
  }
  std::sort(by_from.begin(), by_from.end());
  auto find_from = [&by_from](int v) {
    auto it = std::lower_bound(by_from.begin(), by_from.end(), std::make_pair(v, -1));
    return it->second;
  };
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const int nt = fresh[i];
    const int w = ctx.boundary[i].to;
    const int across = find_from(w);  // (w, x, q) holds q -> w
    tris_[nt].n[0] = across;
    tris_[across].n[1] = nt;
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int nt : fresh) {
      if (is_ghost(nt) != (pass == 0)) continue;
      for (int s : tris_[nt].v) {
        if (s != kInfinite) verts_[s].tri = nt;
      }
    }
  }
  for (int nt : fresh) {
    if (!is_ghost(nt)) {
      last_tri_ = nt;
      if (record) record->created.push_back(ids_of(nt));
    }
  }
}

void Triangulation::enter_planar_mode(ChangeRecord* record) {
  std::vector<int> slots;
  for (int s = 1; s < static_cast<int>(verts_.size()); ++s) {
    if (verts_[s].alive) slots.push_back(s);
  }
  int a = slots[0], b = slots[1], c = -1;
  for (std::size_t i = 2; i < slots.size(); ++i) {
    if (orient(verts_[a].p, verts_[b].p, verts_[slots[i]].p) != 0) {
      c = slots[i];
      break;
    }
  }
  if (orient(verts_[a].p, verts_[b].p, verts_[c].p) < 0) std::swap(a, b);
  std::vector<int> fresh{new_triangle(a, b, c), new_triangle(b, a, kInfinite), new_triangle(c, b, kInfinite),
                         new_triangle(a, c, kInfinite)};
  stitch(fresh, {});
  verts_[a].tri = verts_[b].tri = verts_[c].tri = fresh[0];
  last_tri_ = fresh[0];
  planar_ = true;
  for (int s : slots) {
    if (s != a && s != b && s != c) insert_slot(s, nullptr, -1);
  }
  if (record) {
    record->destroyed.clear();
    record->created = triangles();
  }
}

void Triangulation::leave_planar_mode() {
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (tris_[t].alive) free_triangle(t);
  }
  for (auto& v : verts_) v.tri = -1;
  planar_ = false;
  last_tri_ = -1;
}

void Triangulation::collect_star(int vslot, std::vector<int>& ring, std::vector<int>& ring_outer,
                                 std::vector<int>* star) const {
  ring.clear();
  ring_outer.clear();
  if (star) star->clear();
  const int start = verts_[vslot].tri;
  int t = start;
  do {
    const int i = index_in(t, vslot);
    ring.push_back(tris_[t].v[(i + 1) % 3]);
    ring_outer.push_back(tris_[t].n[i]);
    if (star) star->push_back(t);
    t = tris_[t].n[(i + 1) % 3];
  } while (t != start);
}

void Triangulation::fill_hole(QueryContext& ctx, bool on_hull) const {
  ctx.fill.clear();
  ctx.chain.clear();
  const auto& ring = ctx.ring;
  const std::size_t k = ring.size();
  auto empty_circle = [&](int a, int b, int c) {
    const Point2& pa = verts_[a].p;
    const Point2& pb = verts_[b].p;
    const Point2& pc = verts_[c].p;
    for (int w : ring) {
      if (w == kInfinite || w == a || w == b || w == c) continue;
      if (incircle_perturbed(pa, pb, pc, verts_[w].p) > 0) return false;
    }
    return true;
  };
  auto is_ear = [&](int a, int b, int c) {
    return orient(verts_[a].p, verts_[b].p, verts_[c].p) > 0 && empty_circle(a, b, c);
  };
  if (on_hull) {
    std::size_t inf_at = 0;
    while (ring[inf_at] != kInfinite) ++inf_at;
    for (std::size_t j = 1; j < k; ++j) ctx.chain.push_back(ring[(inf_at + j) % k]);
    auto& poly = ctx.chain;
    bool clipped = true;
    while (clipped && poly.size() >= 3) {
      clipped = false;
      for (std::size_t i = 0; i + 2 < poly.size(); ++i) {
        if (is_ear(poly[i], poly[i + 1], poly[i + 2])) {
          ctx.fill.push_back({poly[i], poly[i + 1], poly[i + 2]});
          poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i + 1));
          clipped = true;
          break;
        }
      }
    }
    return;
  }
  std::vector<int>& poly = ctx.chain;
  poly.assign(ring.begin(), ring.end());
  while (poly.size() > 3) {
    const std::size_t m = poly.size();
    bool clipped = false;
    for (std::size_t i = 0; i < m; ++i) {
      const int a = poly[i], b = poly[(i + 1) % m], c = poly[(i + 2) % m];
      if (is_ear(a, b, c)) {
        ctx.fill.push_back({a, b, c});
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>((i + 1) % m));
        clipped = true;
        break;
      }
    }
    if (!clipped) throw Error("hole retriangulation found no Delaunay ear");
  }
  ctx.fill.push_back({poly[0], poly[1], poly[2]});
  poly.clear();
}

void Triangulation::remove(PointId id, ChangeRecord* record) {
  auto it = id_to_slot_.find(id);
  if (it == id_to_slot_.end()) throw MissingPointError("point id " + std::to_string(id) + " not present");
  const int v = it->second;
  if (record) {
    record->created.clear();
    record->destroyed.clear();
  }
  auto kill_vertex = [&] {
    verts_[v].alive = false;
    verts_[v].tri = -1;
    free_verts_.push_back(v);
    id_to_slot_.erase(it);
  };
  if (!planar_) {
    kill_vertex();
    return;
  }
  QueryContext& ctx = own_ctx_;
  std::vector<int> star;
  collect_star(v, ctx.ring, ctx.ring_outer, &star);
  const bool on_hull = std::find(ctx.ring.begin(), ctx.ring.end(), kInfinite) != ctx.ring.end();
  fill_hole(ctx, on_hull);
  std::size_t star_solid = 0;
  for (int t : star) star_solid += is_ghost(t) ? 0 : 1;
  if (ctx.fill.empty() && star_solid == solid_count_) {
    if (record) {
      for (int t : star) {
        if (!is_ghost(t)) record->destroyed.push_back(ids_of(t));
      }
    }
    leave_planar_mode();
    kill_vertex();
    return;
  }
  std::vector<HalfEdge> outer;
  const std::size_t k = ctx.ring.size();
  for (std::size_t j = 0; j < k; ++j) {
    const int a = ctx.ring[j], b = ctx.ring[(j + 1) % k];
    const int o = ctx.ring_outer[j];
    int idx = 0;
    while (tris_[o].v[idx] == a || tris_[o].v[idx] == b) ++idx;
    outer.push_back({b, a, o, idx});
  }
  for (int t : star) {
    if (record && !is_ghost(t)) record->destroyed.push_back(ids_of(t));
    free_triangle(t);
  }
  std::vector<int> fresh;
  for (const auto& f : ctx.fill) fresh.push_back(new_triangle(f[0], f[1], f[2]));
  if (on_hull) {
    for (std::size_t i = 0; i + 1 < ctx.chain.size(); ++i) {
      fresh.push_back(new_triangle(ctx.chain[i], ctx.chain[i + 1], kInfinite));
    }
  }
  stitch(fresh, outer);
  for (int pass = 0; pass < 2; ++pass) {
    for (int nt : fresh) {
      if (is_ghost(nt) != (pass == 0)) continue;
      for (int s : tris_[nt].v) {
        if (s != kInfinite) verts_[s].tri = nt;
      }
    }
  }
  // Ring vertices keep a valid incident triangle through the outer triangles.
  for (std::size_t j = 0; j < k; ++j) {
    const int a = ctx.ring[j];
    if (a != kInfinite && (verts_[a].tri < 0 || !tris_[verts_[a].tri].alive || index_in(verts_[a].tri, a) < 0)) {
      verts_[a].tri = ctx.ring_outer[j];
    }
  }
  for (int nt : fresh) {
    if (!is_ghost(nt)) {
      last_tri_ = nt;
      if (record) record->created.push_back(ids_of(nt));
    }
  }
  if (last_tri_ >= 0 && !tris_[last_tri_].alive) last_tri_ = -1;
  kill_vertex();
}

void Triangulation::mark_status(QueryContext& ctx, int a, int b, bool before, bool after) const {
  if (a == kInfinite || b == kInfinite) return;
  if (a > b) std::swap(a, b);
  for (auto& s : ctx.status) {
    if (s.a == a && s.b == b) {
      s.before = s.before || before;
      s.after = s.after || after;
      return;
    }
  }
  ctx.status.push_back({a, b, before, after});
}

bool Triangulation::triple_beta(const std::array<int, 3>& v, const BetaThreshold& beta) const {
  if (v[0] == kInfinite || v[1] == kInfinite || v[2] == kInfinite) return false;
  return beta.accepts(verts_[v[0]].p, verts_[v[1]].p, verts_[v[2]].p);
}

void Triangulation::finish_delta(const Point2* extra, QueryContext& ctx, EdgeDelta& out) const {
  for (const auto& s : ctx.status) {
    if (s.before == s.after) continue;
    const Point2& pa = slot_point(s.a, extra);
    const Point2& pb = slot_point(s.b, extra);
    PointId ia = pa.id, ib = pb.id;
    if (ia > ib) std::swap(ia, ib);
    const Edge e{ia, ib, std::sqrt(squared_distance(pa, pb))};
    (s.after ? out.created : out.destroyed).push_back(e);
  }
}

void Triangulation::insertion_edge_delta(const Point2& x, const BetaThreshold& beta, QueryContext& ctx,
                                         EdgeDelta& out) const {
  out.clear();
  if (id_to_slot_.count(x.id)) throw DuplicatePointError("point id " + std::to_string(x.id) + " already present");
  if (!planar_) {
    Triangulation scratch;
    for (int s = 1; s < static_cast<int>(verts_.size()); ++s) {
      if (verts_[s].alive) scratch.insert(verts_[s].p);
    }
    scratch.insert(x);
    out.created = scratch.beta_edges(beta);
    return;
  }
  const int t = locate(x, ctx.hint);
  check_not_duplicate(t, x);
  ctx.hint = t;
  collect_cavity(x, t, ctx);
  ctx.status.clear();
  for (int c : ctx.cavity) {
    if (is_ghost(c)) continue;
    const bool b = triangle_beta(c, beta);
    const auto& v = tris_[c].v;
    mark_status(ctx, v[0], v[1], b, false);
    mark_status(ctx, v[1], v[2], b, false);
    mark_status(ctx, v[2], v[0], b, false);
  }
  for (const auto& e : ctx.boundary) {
    if (e.from == kInfinite || e.to == kInfinite) continue;
    const bool ob = triangle_beta(e.outer, beta);
    const bool nb = beta.accepts(verts_[e.from].p, verts_[e.to].p, x);
    mark_status(ctx, e.from, e.to, ob, ob || nb);
    mark_status(ctx, e.to, -1, false, nb);
    mark_status(ctx, -1, e.from, false, nb);
  }
  finish_delta(&x, ctx, out);
}

void Triangulation::removal_edge_delta(PointId id, const BetaThreshold& beta, QueryContext& ctx,
                                       EdgeDelta& out) const {
  out.clear();
  auto it = id_to_slot_.find(id);
  if (it == id_to_slot_.end()) throw MissingPointError("point id " + std::to_string(id) + " not present");
  if (!planar_) return;
  const int v = it->second;
  collect_star(v, ctx.ring, ctx.ring_outer, nullptr);
  const bool on_hull = std::find(ctx.ring.begin(), ctx.ring.end(), kInfinite) != ctx.ring.end();
  fill_hole(ctx, on_hull);
  ctx.status.clear();
  // "before" is the configuration without the point, "after" the current one.
  const std::size_t k = ctx.ring.size();
  for (std::size_t j = 0; j < k; ++j) {
    const int a = ctx.ring[j], b = ctx.ring[(j + 1) % k];
    if (a == kInfinite || b == kInfinite) continue;
    const bool sb = triple_beta({v, a, b}, beta);
    const bool ob = triangle_beta(ctx.ring_outer[j], beta);
    mark_status(ctx, a, b, ob, ob || sb);
    mark_status(ctx, v, a, false, sb);
    mark_status(ctx, b, v, false, sb);
  }
  for (const auto& f : ctx.fill) {
    const bool fb = triple_beta(f, beta);
    mark_status(ctx, f[0], f[1], fb, false);
    mark_status(ctx, f[1], f[2], fb, false);
    mark_status(ctx, f[2], f[0], fb, false);
  }
  finish_delta(nullptr, ctx, out);
}

const Point2& Triangulation::point(PointId id) const {
  auto it = id_to_slot_.find(id);
  if (it == id_to_slot_.end()) throw MissingPointError("point id " + std::to_string(id) + " not present");
  return verts_[it->second].p;
}

std::vector<Point2> Triangulation::points() const {
  std::vector<Point2> out;
  out.reserve(size());
  for (int s = 1; s < static_cast<int>(verts_.size()); ++s) {
    if (verts_[s].alive) out.push_back(verts_[s].p);
  }
  return out;
}

std::vector<TriangleIds> Triangulation::triangles() const {
  std::vector<TriangleIds> out;
  out.reserve(solid_count_);
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (tris_[t].alive && !is_ghost(t)) out.push_back(ids_of(t));
  }
  return out;
}

std::vector<Edge> Triangulation::edges() const {
  std::vector<Edge> out;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive || is_ghost(t)) continue;
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (!is_ghost(nb) && nb < t) continue;
      const Point2& a = verts_[tris_[t].v[(i + 1) % 3]].p;
      const Point2& b = verts_[tris_[t].v[(i + 2) % 3]].p;
      out.push_back({std::min(a.id, b.id), std::max(a.id, b.id), std::sqrt(squared_distance(a, b))});
    }
  }
  return out;
}

std::vector<Edge> Triangulation::beta_edges(const BetaThreshold& beta) const {
  std::vector<Edge> out;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive || !triangle_beta(t, beta)) continue;
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (nb < t && triangle_beta(nb, beta)) continue;
      const Point2& a = verts_[tris_[t].v[(i + 1) % 3]].p;
      const Point2& b = verts_[tris_[t].v[(i + 2) % 3]].p;
      out.push_back({std::min(a.id, b.id), std::max(a.id, b.id), std::sqrt(squared_distance(a, b))});
    }
  }
  return out;
}

std::size_t Triangulation::hull_size() const {
  if (!planar_) return size();
  std::size_t h = 0;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (tris_[t].alive && is_ghost(t)) ++h;
  }
  return h;
}

bool Triangulation::validate() const {
  if (!planar_) return solid_count_ == 0;
  std::size_t solid = 0;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    const Tri& tr = tris_[t];
    if (!tr.alive) continue;
    const bool ghost = is_ghost(t);
    if (!ghost) {
      ++solid;
      if (orient(verts_[tr.v[0]].p, verts_[tr.v[1]].p, verts_[tr.v[2]].p) <= 0) return false;
    }
    for (int i = 0; i < 3; ++i) {
      const int nb = tr.n[i];
      if (nb < 0 || nb >= static_cast<int>(tris_.size()) || !tris_[nb].alive) return false;
      const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
      const int j = index_in(nb, a), jb = index_in(nb, b);
      if (j < 0 || jb < 0) return false;
      const int opp = 3 - j - jb;
      if (tris_[nb].n[opp] != t) return false;
      if (tris_[nb].v[(opp + 1) % 3] != b) return false;
      if (!ghost && !is_ghost(nb)) {
        if (incircle_perturbed(verts_[tr.v[0]].p, verts_[tr.v[1]].p, verts_[tr.v[2]].p,
                               verts_[tris_[nb].v[opp]].p) > 0) {
          return false;
        }
      }
    }
  }
  if (solid != solid_count_) return false;
  for (int s = 1; s < static_cast<int>(verts_.size()); ++s) {
    if (!verts_[s].alive) continue;
    const int t = verts_[s].tri;
    if (t < 0 || !tris_[t].alive || index_in(t, s) < 0) return false;
  }
  return true;
}

Triangulation build_delaunay(const Configuration& config) {
  return Triangulation::build(config);
}

ChangeRecord insert_point(Triangulation& tri, const Point2& p) {
  ChangeRecord record;
  tri.insert(p, &record);
  return record;
}

ChangeRecord remove_point(Triangulation& tri, PointId id) {
  ChangeRecord record;
  tri.remove(id, &record);
  return record;
}

std::vector<Edge> beta_edges(const Triangulation& tri, double beta0) { return tri.beta_edges(BetaThreshold(beta0)); }

EdgeDelta insertion_edge_delta(const Triangulation& tri, const Point2& x, double beta0) {
  QueryContext ctx;
  EdgeDelta out;
  tri.insertion_edge_delta(x, BetaThreshold(beta0), ctx, out);
  return out;
}

}  // namespace nngibbs
