#ifndef NNGIBBS_MODEL_HPP
#define NNGIBBS_MODEL_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nngibbs/point_grid.hpp"
#include "nngibbs/triangulation.hpp"
#include "nngibbs/types.hpp"

namespace nngibbs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sufficient statistics (|phi|, edge counts per bin). Integer valued, stored
// as doubles, which is exact for all counts that fit in memory.
using Stats = Eigen::VectorXd;

enum class GraphKind { None, BetaDelaunay, Complete };

std::string graph_name(GraphKind kind);
// Accepts "none", "beta-delaunay" and "complete".
GraphKind parse_graph_kind(const std::string& name);

// Bin bounds 0 = d_1 <= d_2 <= ... <= d_{p+1}. Statistic i (zero-based, i >= 1)
// counts edges with length in (d_i-1, d_i] using one-based bound indices, i.e.
// (d[i-1], d[i]] with zero-based storage.
class BinBounds {
 public:
  BinBounds() : d_{0.0} {}
  explicit BinBounds(std::vector<double> d);

  std::size_t dim() const { return d_.size(); }
  double range() const { return d_.back(); }
  const std::vector<double>& values() const { return d_; }
  // Statistic index of an edge of this length, or -1 when it falls in no bin.
  int bin_of(double length) const;
  // Smallest positive bin width, or 0 when there are no bins.
  double finest_width() const;

 private:
  std::vector<double> d_;
};

class InteractionModel {
 public:
  // Poisson reference model, p = 0, with an optional hard core.
  static InteractionModel none(std::optional<double> hard_core = std::nullopt);
  static InteractionModel beta_delaunay(double beta0, BinBounds bins, std::optional<double> hard_core = std::nullopt);
  static InteractionModel complete(BinBounds bins, std::optional<double> hard_core = std::nullopt);

  GraphKind graph() const { return graph_; }
  double beta0() const { return beta0_; }
  const BinBounds& bins() const { return bins_; }
  const std::optional<double>& hard_core() const { return hard_core_; }
  // Number of parameters p + 1.
  int dim() const { return static_cast<int>(bins_.dim()); }
  // Interaction range d_{p+1}.
  double range() const { return bins_.range(); }
  // Radius beyond which points cannot change u(x|phi), never less than the
  // hard-core distance. For the complete graph it is d_{p+1}. For the
  // beta-Delaunay graph a changed edge of length <= d_{p+1} lies on a
  // beta-triangle of circumdiameter below r = d_{p+1} / sin(beta0) whose disc
  // meets x, and the beta-triangle on the far side of that edge can reach
  // another r further out, so the radius is 2 r.
  double locality_radius() const;
  // Circumdiameter bound r = d_{p+1} / sin(beta0) of any beta-triangle with an
  // edge inside the interaction range (d_{p+1} for other graphs).
  double triangle_radius() const;
  std::string describe() const;

 private:
  InteractionModel() = default;
  GraphKind graph_ = GraphKind::None;
  double beta0_ = 0.0;
  BinBounds bins_;
  std::optional<double> hard_core_;
};

// A configuration together with whatever structure the model needs to evaluate
// statistics incrementally: a Delaunay triangulation for the beta-Delaunay
// graph and a hash grid for range queries and hard-core checks. Queries reuse
// internal scratch space, so one PatternState must not be queried from two
// threads at once.
class PatternState {
 public:
  PatternState(const InteractionModel& model, const Window& extent);
  // Loads every point of the configuration; does not check the hard core.
  PatternState(const InteractionModel& model, const Configuration& config);

  const InteractionModel& model() const { return model_; }
  const Window& extent() const { return extent_; }

  void insert(const Point2& p);
  void remove(PointId id);
  std::size_t size() const { return points_.size(); }
  bool contains(PointId id) const { return index_.count(id) != 0; }
  const Point2& point(PointId id) const;
  const std::vector<Point2>& points() const { return points_; }
  Configuration configuration() const { return {points_, extent_}; }
  // Id one larger than any id ever inserted (suitable for transient query points).
  PointId fresh_id() const { return next_id_; }

  // u(x | phi) for x not in phi. Coordinates coinciding with a stored point
  // raise DuplicatePointError.
  Stats local_stats(const Point2& x) const;
  // u(y | phi \ y) for a stored point y.
  Stats removal_stats(PointId id) const;
  // u(phi) from scratch.
  Stats suff_stats() const;

  // False when x would lie strictly closer than the hard-core distance to some
  // stored point other than `exclude`.
  bool admissible_insert(const Point2& x, PointId exclude = -1) const;
  // True when no stored pair is closer than the hard-core distance.
  bool admissible() const;

  const Triangulation* triangulation() const { return tri_.get(); }

 private:
  void add_edge(Stats& u, double length, double sign) const;

  InteractionModel model_;
  Window extent_;
  std::vector<Point2> points_;
  std::unordered_map<PointId, std::size_t> index_;
  PointId next_id_ = 0;
  std::unique_ptr<Triangulation> tri_;
  std::unique_ptr<PointGrid> grid_;
  std::optional<BetaThreshold> beta_;
  mutable QueryContext ctx_;
  mutable EdgeDelta delta_;
};

// Throws InadmissibleConfigurationError if the hard core is violated.
Stats suff_stats(const Configuration& phi, const InteractionModel& model);
Stats local_stats(const Point2& x, const Configuration& phi, const InteractionModel& model);
// theta' u(x|phi), or +infinity when x violates the hard core.
double local_energy(const Point2& x, const Configuration& phi, const Vector& theta, const InteractionModel& model);
// theta' u(phi), or +infinity under a hard-core violation.
double energy(const Configuration& phi, const Vector& theta, const InteractionModel& model);

// Throws ParameterError unless theta has the model's dimension and finite entries.
void check_theta(const Vector& theta, const InteractionModel& model);

struct StabilityBounds {
  Vector k1;  // lower bounds u_i(x|phi) >= -k1_i
  Vector k2;  // upper bounds u_i(x|phi) <= k2_i
};

// Bounds used when none are supplied: u_1 = 1 always; for the beta-Delaunay
// graph an inserted point has fewer than 2 pi / beta0 incident beta-triangles,
// which bounds the created edges, and destroyed edges are capped at 6 per bin.
StabilityBounds default_stability_bounds(const InteractionModel& model);

struct StabilitySample {
  Point2 x;
  Configuration phi;
};

struct StabilityReport {
  std::size_t cases = 0;
  Vector min_u;
  Vector max_u;
  double min_local_energy = 0.0;
  // Lower bound -K on theta' u(x|phi) implied by the bounds:
  // K = -sum_i min(-theta_i k1_i, theta_i k2_i), which is sum_i theta_i k1_i for theta >= 0.
  double k = 0.0;
  std::size_t bound_violations = 0;
  std::size_t energy_violations = 0;
  bool ok() const { return bound_violations == 0 && energy_violations == 0; }
};

StabilityReport check_stability(const InteractionModel& model, const Vector& theta,
                                const std::vector<StabilitySample>& samples, const StabilityBounds& bounds);

}  // namespace nngibbs

#endif  // NNGIBBS_MODEL_HPP
