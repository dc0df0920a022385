#include "nngibbs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nngibbs {

std::string graph_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::None: return "none";
    case GraphKind::BetaDelaunay: return "beta-delaunay";
    case GraphKind::Complete: return "complete";
  }
  return "unknown";
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "none") return GraphKind::None;
  if (name == "beta-delaunay") return GraphKind::BetaDelaunay;
  if (name == "complete") return GraphKind::Complete;
  throw ParameterError("unknown graph kind '" + name + "' (expected none, beta-delaunay or complete)");
}

BinBounds::BinBounds(std::vector<double> d) : d_(std::move(d)) {
  if (d_.empty()) throw ParameterError("bin bounds must contain at least d_1 = 0");
  if (d_[0] != 0.0) throw ParameterError("first bin bound must be 0");
  for (std::size_t i = 1; i < d_.size(); ++i) {
    if (!std::isfinite(d_[i])) throw ParameterError("bin bounds must be finite");
    if (!(d_[i] > d_[i - 1])) throw ParameterError("bin bounds must be strictly increasing after d_1");
  }
}

int BinBounds::bin_of(double length) const {
  if (!(length > 0.0) || length > d_.back()) return -1;
  const auto it = std::lower_bound(d_.begin() + 1, d_.end(), length);
  return static_cast<int>(it - d_.begin());
}

double BinBounds::finest_width() const {
  double w = 0.0;
  for (std::size_t i = 1; i < d_.size(); ++i) {
    const double width = d_[i] - d_[i - 1];
    if (w == 0.0 || width < w) w = width;
  }
  return w;
}

namespace {

void check_hard_core(const std::optional<double>& delta) {
  if (delta && !(*delta > 0.0 && std::isfinite(*delta))) throw ParameterError("hard-core distance must be positive");
}

}  // namespace

InteractionModel InteractionModel::none(std::optional<double> hard_core) {
  check_hard_core(hard_core);
  InteractionModel m;
  m.graph_ = GraphKind::None;
  m.hard_core_ = hard_core;
  return m;
}

InteractionModel InteractionModel::beta_delaunay(double beta0, BinBounds bins, std::optional<double> hard_core) {
  check_hard_core(hard_core);
  BetaThreshold check(beta0);
  InteractionModel m;
  m.graph_ = GraphKind::BetaDelaunay;
  m.beta0_ = beta0;
  m.bins_ = std::move(bins);
  m.hard_core_ = hard_core;
  return m;
}

InteractionModel InteractionModel::complete(BinBounds bins, std::optional<double> hard_core) {
  check_hard_core(hard_core);
  InteractionModel m;
  m.graph_ = GraphKind::Complete;
  m.bins_ = std::move(bins);
  m.hard_core_ = hard_core;
  return m;
}

double InteractionModel::locality_radius() const {
  double r = 0.0;
  if (graph_ == GraphKind::BetaDelaunay) r = 2.0 * range() / std::sin(beta0_);
  if (graph_ == GraphKind::Complete) r = range();
  if (hard_core_) r = std::max(r, *hard_core_);
  return r;
}

double InteractionModel::triangle_radius() const {
  return graph_ == GraphKind::BetaDelaunay ? range() / std::sin(beta0_) : range();
}

std::string InteractionModel::describe() const {
  std::ostringstream os;
  os << graph_name(graph_);
  if (graph_ == GraphKind::BetaDelaunay) os << " beta0=" << beta0_;
  os << " d=(";
  for (std::size_t i = 0; i < bins_.values().size(); ++i) os << (i ? "," : "") << bins_.values()[i];
  os << ")";
  if (hard_core_) os << " hard_core=" << *hard_core_;
  return os.str();
}

PatternState::PatternState(const InteractionModel& model, const Window& extent) : model_(model), extent_(extent) {
  validate_window(extent);
  if (model_.graph() == GraphKind::BetaDelaunay) {
    tri_ = std::make_unique<Triangulation>(extent);
    beta_.emplace(model_.beta0());
  }
  double cell = 0.0;
  if (model_.graph() == GraphKind::Complete) cell = model_.range();
  if (model_.hard_core()) cell = std::max(cell, *model_.hard_core());
  if (cell > 0.0) grid_ = std::make_unique<PointGrid>(cell);
}

PatternState::PatternState(const InteractionModel& model, const Configuration& config)
    : PatternState(model, config.window) {
  for (const auto& p : config.points) insert(p);
}

void PatternState::insert(const Point2& p) {
  if (index_.count(p.id)) throw DuplicatePointError("point id " + std::to_string(p.id) + " already present");
  if (tri_) {
    tri_->insert(p);
  } else if (grid_) {
    bool dup = false;
    grid_->for_each_within(p.x, p.y, 0.0, [&](const Point2&, double) { dup = true; });
    if (dup) throw DuplicatePointError("point coincides with an existing point");
  }
  if (grid_) grid_->insert(p);
  index_[p.id] = points_.size();
  points_.push_back(p);
  next_id_ = std::max(next_id_, p.id + 1);
}

void PatternState::remove(PointId id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw MissingPointError("point id " + std::to_string(id) + " not present");
  const std::size_t i = it->second;
  const Point2 p = points_[i];
  if (tri_) tri_->remove(id);
  if (grid_) grid_->remove(p);
  index_.erase(it);
  if (i + 1 != points_.size()) {
    points_[i] = points_.back();
    index_[points_[i].id] = i;
  }
  points_.pop_back();
}

const Point2& PatternState::point(PointId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw MissingPointError("point id " + std::to_string(id) + " not present");
  return points_[it->second];
}

void PatternState::add_edge(Stats& u, double length, double sign) const {
  const int b = model_.bins().bin_of(length);
  if (b >= 0) u[b] += sign;
}

Stats PatternState::local_stats(const Point2& x) const {
  Stats u = Stats::Zero(model_.dim());
  u[0] = 1.0;
  switch (model_.graph()) {
    case GraphKind::None:
      break;
    case GraphKind::BetaDelaunay:
      tri_->insertion_edge_delta(x, *beta_, ctx_, delta_);
      for (const auto& e : delta_.created) add_edge(u, e.length, 1.0);
      for (const auto& e : delta_.destroyed) add_edge(u, e.length, -1.0);
      break;
    case GraphKind::Complete: {
      bool dup = false;
      grid_->for_each_within(x.x, x.y, model_.range(), [&](const Point2& q, double d2) {
        if (q.id == x.id) return;
        if (d2 == 0.0) dup = true;
        add_edge(u, std::sqrt(d2), 1.0);
      });
      if (dup) throw DuplicatePointError("point coincides with an existing point");
      break;
    }
  }
  return u;
}

Stats PatternState::removal_stats(PointId id) const {
  const Point2& y = point(id);
  Stats u = Stats::Zero(model_.dim());
  u[0] = 1.0;
  switch (model_.graph()) {
    case GraphKind::None:
      break;
    case GraphKind::BetaDelaunay:
      tri_->removal_edge_delta(id, *beta_, ctx_, delta_);
      for (const auto& e : delta_.created) add_edge(u, e.length, 1.0);
      for (const auto& e : delta_.destroyed) add_edge(u, e.length, -1.0);
      break;
    case GraphKind::Complete:
      grid_->for_each_within(y.x, y.y, model_.range(), [&](const Point2& q, double d2) {
        if (q.id != id) add_edge(u, std::sqrt(d2), 1.0);
      });
      break;
  }
  return u;
}

Stats PatternState::suff_stats() const {
  Stats u = Stats::Zero(model_.dim());
  u[0] = static_cast<double>(points_.size());
  switch (model_.graph()) {
    case GraphKind::None:
      break;
    case GraphKind::BetaDelaunay:
      for (const auto& e : tri_->beta_edges(*beta_)) add_edge(u, e.length, 1.0);
      break;
    case GraphKind::Complete:
      for (const auto& p : points_) {
        grid_->for_each_within(p.x, p.y, model_.range(), [&](const Point2& q, double d2) {
          if (q.id > p.id) add_edge(u, std::sqrt(d2), 1.0);
        });
      }
      break;
  }
  return u;
}

bool PatternState::admissible_insert(const Point2& x, PointId exclude) const {
  if (!model_.hard_core()) return true;
  return !grid_->any_closer_than(x.x, x.y, *model_.hard_core(), exclude);
}

bool PatternState::admissible() const {
  if (!model_.hard_core()) return true;
  for (const auto& p : points_) {
    if (!admissible_insert(p, p.id)) return false;
  }
  return true;
}

namespace {

void require_admissible(const PatternState& state) {
  if (!state.admissible()) {
    throw InadmissibleConfigurationError("configuration has a pair closer than the hard-core distance");
  }
}

}  // namespace

Stats suff_stats(const Configuration& phi, const InteractionModel& model) {
  PatternState state(model, phi);
  require_admissible(state);
  return state.suff_stats();
}

Stats local_stats(const Point2& x, const Configuration& phi, const InteractionModel& model) {
  PatternState state(model, phi);
  if (state.contains(x.id)) throw DuplicatePointError("point id " + std::to_string(x.id) + " already present");
  return state.local_stats(x);
}

double local_energy(const Point2& x, const Configuration& phi, const Vector& theta, const InteractionModel& model) {
  check_theta(theta, model);
  PatternState state(model, phi);
  if (state.contains(x.id)) throw DuplicatePointError("point id " + std::to_string(x.id) + " already present");
  if (!state.admissible_insert(x)) return std::numeric_limits<double>::infinity();
  return theta.dot(state.local_stats(x));
}

double energy(const Configuration& phi, const Vector& theta, const InteractionModel& model) {
  check_theta(theta, model);
  PatternState state(model, phi);
  if (!state.admissible()) return std::numeric_limits<double>::infinity();
  return theta.dot(state.suff_stats());
}

void check_theta(const Vector& theta, const InteractionModel& model) {
  if (theta.size() != model.dim()) {
    throw ParameterError("theta has " + std::to_string(theta.size()) + " entries, model needs " +
                         std::to_string(model.dim()));
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) throw ParameterError("theta entries must be finite");
  }
}

StabilityBounds default_stability_bounds(const InteractionModel& model) {
  const int k = model.dim();
  StabilityBounds b{Vector::Zero(k), Vector::Zero(k)};
  b.k2[0] = 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 1; i < k; ++i) {
    if (model.graph() == GraphKind::BetaDelaunay) {
      b.k1[i] = 6.0;
      b.k2[i] = 2.0 * std::ceil(2.0 * std::numbers::pi / model.beta0());
    } else {
      b.k1[i] = 0.0;
      b.k2[i] = inf;
    }
  }
  return b;
}

StabilityReport check_stability(const InteractionModel& model, const Vector& theta,
                                const std::vector<StabilitySample>& samples, const StabilityBounds& bounds) {
  check_theta(theta, model);
  const int k = model.dim();
  if (bounds.k1.size() != k || bounds.k2.size() != k) throw ParameterError("stability bounds have the wrong dimension");
  StabilityReport report;
  const double inf = std::numeric_limits<double>::infinity();
  report.min_u = Vector::Constant(k, inf);
  report.max_u = Vector::Constant(k, -inf);
  report.min_local_energy = inf;
  for (int i = 0; i < k; ++i) {
    const double lo = -theta[i] * bounds.k1[i];
    const double hi = theta[i] * bounds.k2[i];
    const double m = std::isnan(hi) ? lo : std::min(lo, hi);
    report.k -= (theta[i] == 0.0) ? 0.0 : m;
  }
  for (const auto& s : samples) {
    PatternState state(model, s.phi);
    if (!state.admissible_insert(s.x)) continue;
    const Stats u = state.local_stats(s.x);
    ++report.cases;
    bool bad = false;
    for (int i = 0; i < k; ++i) {
      report.min_u[i] = std::min(report.min_u[i], u[i]);
      report.max_u[i] = std::max(report.max_u[i], u[i]);
      if (u[i] < -bounds.k1[i] || u[i] > bounds.k2[i]) bad = true;
    }
    if (bad) ++report.bound_violations;
    const double dv = theta.dot(u);
    report.min_local_energy = std::min(report.min_local_energy, dv);
    if (dv < -report.k) ++report.energy_violations;
  }
  return report;
}

}  // namespace nngibbs
