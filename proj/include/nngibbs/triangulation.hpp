#ifndef NNGIBBS_TRIANGULATION_HPP
#define NNGIBBS_TRIANGULATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nngibbs/types.hpp"

namespace nngibbs {

using TriangleIds = std::array<PointId, 3>;

struct ChangeRecord {
  std::vector<TriangleIds> destroyed;
  std::vector<TriangleIds> created;
};

// Undirected edge with a < b.
struct Edge {
  PointId a = 0;
  PointId b = 0;
  double length = 0.0;
};

struct EdgeDelta {
  std::vector<Edge> created;
  std::vector<Edge> destroyed;
  void clear() {
    created.clear();
    destroyed.clear();
  }
};

// Angle threshold with its sine and cosine, shared by all beta filters.
class BetaThreshold {
 public:
  explicit BetaThreshold(double beta0);
  double value() const { return beta0_; }
  // True when every interior angle of the counter-clockwise triangle exceeds beta0.
  bool accepts(const Point2& a, const Point2& b, const Point2& c) const;

 private:
  double beta0_;
  double cos_;
  double sin_;
};

// Smallest interior angle in radians.
double min_angle(const Point2& a, const Point2& b, const Point2& c);
// Diameter of the circumscribed circle.
double circumdiameter(const Point2& a, const Point2& b, const Point2& c);

class Triangulation;

// Scratch state for read-only queries. One context per thread; a context may
// be reused across queries and across triangulations.
class QueryContext {
 private:
  friend class Triangulation;
  struct BoundaryEdge {
    int from;
    int to;
    int outer;
  };
  struct EdgeStatus {
    int a;
    int b;
    bool before;
    bool after;
  };
  std::vector<std::uint32_t> stamp;
  std::uint32_t generation = 0;
  int hint = -1;
  std::vector<int> stack;
  std::vector<int> cavity;
  std::vector<BoundaryEdge> boundary;
  std::vector<int> ring;
  std::vector<int> ring_outer;
  std::vector<int> chain;
  std::vector<std::array<int, 3>> fill;
  std::vector<EdgeStatus> status;
};

// Planar Delaunay triangulation with incremental insertion and removal.
//
// Points are identified by caller-chosen ids. Ties between cocircular points
// are broken by symbolic perturbation ordered by id, so the triangulation is a
// function of the point set alone. Hull edges are real edges: the structure
// closes the hull with ghost triangles incident to an implicit vertex at
// infinity, which never appear through the public interface.
class Triangulation {
 public:
  Triangulation();
  // The extent sizes the point-location bucket grid; points outside it are still accepted.
  explicit Triangulation(const Window& locator_extent);

  static Triangulation build(const Configuration& config);

  // Throws DuplicatePointError if p coincides with an existing point or id.
  void insert(const Point2& p, ChangeRecord* record = nullptr);
  // Throws MissingPointError for an unknown id.
  void remove(PointId id, ChangeRecord* record = nullptr);

  // Beta-edge changes caused by inserting x, computed from the conflict
  // cavity without mutating the triangulation.
  void insertion_edge_delta(const Point2& x, const BetaThreshold& beta, QueryContext& ctx, EdgeDelta& out) const;
  // Beta-edge changes caused by inserting point `id` into the triangulation
  // with that point removed, i.e. the edges it supports versus the
  // retriangulation of its star. Read-only.
  void removal_edge_delta(PointId id, const BetaThreshold& beta, QueryContext& ctx, EdgeDelta& out) const;

  std::size_t size() const { return id_to_slot_.size(); }
  bool contains(PointId id) const { return id_to_slot_.count(id) != 0; }
  const Point2& point(PointId id) const;
  std::vector<Point2> points() const;

  // Finite triangles as counter-clockwise id triples.
  std::vector<TriangleIds> triangles() const;
  std::size_t triangle_count() const { return solid_count_; }
  std::vector<Edge> edges() const;
  std::vector<Edge> beta_edges(const BetaThreshold& beta) const;
  std::size_t hull_size() const;

  // Checks adjacency symmetry, orientation and the local Delaunay condition on
  // every edge (equivalent to the global empty-circumdisc property).
  bool validate() const;

 private:
  static constexpr int kInfinite = 0;

  struct Vertex {
    Point2 p;
    int tri = -1;
    bool alive = false;
  };
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{};
    bool alive = false;
  };

  bool is_ghost(int t) const {
    const auto& v = tris_[t].v;
    return v[0] == kInfinite || v[1] == kInfinite || v[2] == kInfinite;
  }
  int index_in(int t, int vertex) const;
  bool conflicts(int t, const Point2& q) const;
  bool triangle_beta(int t, const BetaThreshold& beta) const;
  bool triple_beta(const std::array<int, 3>& v, const BetaThreshold& beta) const;
  TriangleIds ids_of(int t) const;

  int new_vertex(const Point2& p);
  int new_triangle(int a, int b, int c);
  void free_triangle(int t);
  int any_solid_triangle() const;
  int start_triangle(const Point2& q, int hint) const;
  // Returns the triangle containing q, or a ghost triangle whose hull edge q lies strictly beyond.
  int locate(const Point2& q, int hint) const;
  void check_not_duplicate(int t, const Point2& q) const;
  void collect_cavity(const Point2& q, int start, QueryContext& ctx) const;
  void collect_star(int vslot, std::vector<int>& ring, std::vector<int>& ring_outer, std::vector<int>* star) const;
  // Delaunay retriangulation of the hole left by removing the vertex whose
  // link is ctx.ring. Fills ctx.fill with finite triangles and, for a hull
  // vertex, ctx.chain with the new hull path.
  void fill_hole(QueryContext& ctx, bool on_hull) const;
  void mark_status(QueryContext& ctx, int a, int b, bool before, bool after) const;
  void finish_delta(const Point2* extra, QueryContext& ctx, EdgeDelta& out) const;
  const Point2& slot_point(int slot, const Point2* extra) const { return slot < 0 ? *extra : verts_[slot].p; }
  PointId slot_id(int slot, const Point2* extra) const { return slot < 0 ? extra->id : verts_[slot].p.id; }
  struct HalfEdge {
    int from;
    int to;
    int tri;
    int index;
  };
  // Links the new triangles to each other and to the outer half-edges.
  void stitch(const std::vector<int>& fresh, const std::vector<HalfEdge>& outer);
  void insert_slot(int vslot, ChangeRecord* record, int located);

  void enter_planar_mode(ChangeRecord* record);
  void leave_planar_mode();
  void bucket_note(int vslot);
  std::size_t bucket_of(double x, double y) const;

  std::vector<Vertex> verts_;
  std::vector<int> free_verts_;
  std::vector<Tri> tris_;
  std::vector<int> free_tris_;
  std::unordered_map<PointId, int> id_to_slot_;
  std::size_t solid_count_ = 0;
  bool planar_ = false;
  int last_tri_ = -1;

  std::optional<Window> extent_;
  int grid_n_ = 0;
  std::vector<int> buckets_;
  mutable QueryContext own_ctx_;
};

// Free-function surface matching the module contract.
Triangulation build_delaunay(const Configuration& config);
ChangeRecord insert_point(Triangulation& tri, const Point2& p);
ChangeRecord remove_point(Triangulation& tri, PointId id);
// Throws ParameterError unless 0 < beta0 <= pi/3.
std::vector<Edge> beta_edges(const Triangulation& tri, double beta0);
EdgeDelta insertion_edge_delta(const Triangulation& tri, const Point2& x, double beta0);

}  // namespace nngibbs

#endif  // NNGIBBS_TRIANGULATION_HPP
