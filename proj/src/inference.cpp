#include "nngibbs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace nngibbs {

double QuadratureGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

QuadratureGrid make_grid(const Window& window, double step) {
  validate_window(window);
  if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("grid step must be positive and finite");
  const auto count = [step](double side) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(side / step - 1e-9)));
  };
  const std::size_t nx = count(window.width()), ny = count(window.height());
  QuadratureGrid g;
  g.window = window;
  g.step = step;
  g.nodes.reserve(nx * ny);
  g.weights.reserve(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x0 = window.xmin + step * static_cast<double>(i);
    const double x1 = i + 1 == nx ? window.xmax : std::min(window.xmax, x0 + step);
    for (std::size_t j = 0; j < ny; ++j) {
      const double y0 = window.ymin + step * static_cast<double>(j);
      const double y1 = j + 1 == ny ? window.ymax : std::min(window.ymax, y0 + step);
      g.nodes.push_back({0.5 * (x0 + x1), 0.5 * (y0 + y1), static_cast<PointId>(g.nodes.size())});
      g.weights.push_back((x1 - x0) * (y1 - y0));
    }
  }
  return g;
}

double default_grid_step(const InteractionModel& model, const Window& window) {
  double step = model.bins().finest_width() / 4.0;
  if (step == 0.0) step = std::min(window.width(), window.height()) / 50.0;
  if (model.hard_core()) step = std::min(step, *model.hard_core() / 2.0);
  return step;
}

void ObservationScheme::validate() const {
  validate_window(full_window);
  validate_window(estimation_window);
  if (!(border >= 0.0)) throw ParameterError("border must be nonnegative");
  const double tol = 1e-9 * std::max({1.0, std::abs(full_window.xmin), std::abs(full_window.xmax),
                                      std::abs(full_window.ymin), std::abs(full_window.ymax)});
  if (!full_window.dilated(tol).contains(estimation_window.dilated(border))) {
    throw ParameterError("estimation window plus border must lie inside the full window");
  }
}

ObservationScheme make_scheme(const Window& full_window, double border) {
  validate_window(full_window);
  if (!(border >= 0.0)) throw ParameterError("border must be nonnegative");
  ObservationScheme s{full_window, full_window.eroded(border), border};
  if (!(s.estimation_window.xmin < s.estimation_window.xmax && s.estimation_window.ymin < s.estimation_window.ymax)) {
    throw ParameterError("border leaves an empty estimation window");
  }
  return s;
}

ObservationScheme make_scheme(const Window& full_window, double border, double cell_size) {
  return align_to_cells(make_scheme(full_window, border), cell_size);
}

ObservationScheme align_to_cells(const ObservationScheme& scheme, double cell_size) {
  if (!(cell_size > 0.0)) throw ParameterError("cell size must be positive");
  ObservationScheme s = scheme;
  auto clip = [cell_size](double& lo, double& hi) {
    const double cells = std::floor((hi - lo) / cell_size + 1e-9);
    if (cells < 1.0) throw ParameterError("estimation window is smaller than one cell");
    const double mid = 0.5 * (lo + hi), half = 0.5 * cells * cell_size;
    lo = mid - half;
    hi = mid + half;
  };
  Window& e = s.estimation_window;
  clip(e.xmin, e.xmax);
  clip(e.ymin, e.ymax);
  const Window& f = s.full_window;
  s.border = std::max(scheme.border, std::min({e.xmin - f.xmin, f.xmax - e.xmax, e.ymin - f.ymin, f.ymax - e.ymax}));
  return s;
}

PseudoLikelihood::PseudoLikelihood(const Configuration& phi, const InteractionModel& model,
                                   const ObservationScheme& scheme, const QuadratureGrid& grid)
    : dim_(model.dim()), area_(scheme.estimation_window.area()), grid_step_(grid.step), scheme_(scheme) {
  scheme.validate();
  for (const auto& p : phi.points) {
    if (!scheme.full_window.contains(p)) throw ValidationError("pattern has a point outside the full window");
  }
  PatternState state(model, Configuration{phi.points, scheme.full_window});
  admissible_ = state.admissible();
  data_sum_ = Vector::Zero(dim_);
  for (const auto& p : phi.points) {
    if (!scheme.estimation_window.contains(p)) continue;
    Row r{p, state.removal_stats(p.id), 1.0};
    data_sum_ += r.u;
    data_.push_back(std::move(r));
  }
  const PointId qid = state.fresh_id();
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    Point2 x{grid.nodes[k].x, grid.nodes[k].y, qid};
    if (!state.admissible_insert(x)) {
      ++excluded_;
      continue;
    }
    Stats u;
    try {
      u = state.local_stats(x);
    } catch (const DuplicatePointError&) {
      // A node on top of a data point: evaluate at a nearby point of the same cell.
      x.x += 1e-7 * grid.step;
      x.y += 0.618e-7 * grid.step;
      u = state.local_stats(x);
    }
    nodes_.push_back({x, std::move(u), grid.weights[k]});
  }
  std::map<std::vector<double>, double> merged;
  for (const auto& r : nodes_) merged[std::vector<double>(r.u.data(), r.u.data() + r.u.size())] += r.weight;
  unique_u_.resize(static_cast<Eigen::Index>(merged.size()), dim_);
  unique_w_.resize(static_cast<Eigen::Index>(merged.size()));
  Eigen::Index i = 0;
  for (const auto& [u, w] : merged) {
    for (int j = 0; j < dim_; ++j) unique_u_(i, j) = u[static_cast<std::size_t>(j)];
    unique_w_[i] = w;
    ++i;
  }
}

double PseudoLikelihood::log_pl(const Vector& theta) const {
  if (theta.size() != dim_) throw ParameterError("theta has the wrong dimension");
  if (!admissible_) return -std::numeric_limits<double>::infinity();
  const Vector e = (-(unique_u_ * theta)).array().exp();
  return -unique_w_.dot(e) - theta.dot(data_sum_);
}

double PseudoLikelihood::contrast(const Vector& theta) const { return -log_pl(theta) / area_; }

Vector PseudoLikelihood::gradient(const Vector& theta) const {
  if (theta.size() != dim_) throw ParameterError("theta has the wrong dimension");
  const Vector we = unique_w_.array() * (-(unique_u_ * theta)).array().exp();
  return (data_sum_ - unique_u_.transpose() * we) / area_;
}

Matrix PseudoLikelihood::hessian(const Vector& theta) const {
  if (theta.size() != dim_) throw ParameterError("theta has the wrong dimension");
  const Vector we = unique_w_.array() * (-(unique_u_ * theta)).array().exp();
  Matrix h = unique_u_.transpose() * we.asDiagonal() * unique_u_ / area_;
  return 0.5 * (h + h.transpose());
}

double log_pl(const Configuration& phi, const Vector& theta, const InteractionModel& model,
              const ObservationScheme& scheme, const QuadratureGrid& grid) {
  return PseudoLikelihood(phi, model, scheme, grid).log_pl(theta);
}

Vector grad_contrast(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                     const ObservationScheme& scheme, const QuadratureGrid& grid) {
  return PseudoLikelihood(phi, model, scheme, grid).gradient(theta);
}

Matrix hessian_contrast(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                        const ObservationScheme& scheme, const QuadratureGrid& grid) {
  return PseudoLikelihood(phi, model, scheme, grid).hessian(theta);
}

namespace {

std::string stat_name(int j) {
  return j == 0 ? std::string("point count u_1") : "edge count u_" + std::to_string(j + 1);
}

void check_identifiable(const PseudoLikelihood& pl) {
  if (!pl.admissible()) throw InadmissibleConfigurationError("pattern violates the hard core");
  if (pl.data_rows().empty()) throw IdentifiabilityError("no data point in the estimation window; theta_1 is not identifiable");
  const int k = pl.dim();
  for (int j = 1; j < k; ++j) {
    bool any = false;
    for (const auto& r : pl.data_rows()) any = any || r.u[j] != 0.0;
    if (!any) {
      throw RankDeficiencyError(stat_name(j) + " is zero at every data point (empty distance bin); theta_" +
                                    std::to_string(j + 1) + " is not identifiable",
                                j);
    }
  }
  const Matrix h = pl.hessian(Vector::Zero(k));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
    Eigen::Index j = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&j);
    throw RankDeficiencyError("singular Hessian: " + stat_name(static_cast<int>(j)) +
                                  " is collinear with the other statistics over the quadrature nodes",
                              static_cast<int>(j));
  }
}

}  // namespace

FitResult fit_mple(const PseudoLikelihood& pl, const FitOptions& opts) {
  if (!(opts.lower < opts.upper)) throw ParameterError("parameter box must satisfy lower < upper");
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1 || opts.max_halvings < 0) {
    throw ParameterError("invalid optimizer settings");
  }
  check_identifiable(pl);
  const int k = pl.dim();
  FitResult r;
  r.area = pl.area();
  r.grid_step = pl.grid_step();
  r.data_points = pl.data_rows().size();
  r.nodes = pl.node_rows().size();
  Vector theta = Vector::Zero(k);
  double value = pl.contrast(theta);
  Vector g = pl.gradient(theta);
  bool polished = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (g.norm() <= opts.tolerance) {
      if (polished) break;
      polished = true;
    }
    const Matrix h = pl.hessian(theta);
    Eigen::LDLT<Matrix> ldlt(h);
    Vector dir = ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !dir.allFinite()) {
      throw RankDeficiencyError("Hessian became singular during Newton iterations", -1);
    }
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving) {
      const Vector trial = theta - t * dir;
      const double v = pl.contrast(trial);
      if (std::isfinite(v) && v <= value) {
        theta = trial;
        value = v;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    r.iterations = it + 1;
    if (!moved) break;
    g = pl.gradient(theta);
    if ((theta.array() <= opts.lower).any() || (theta.array() >= opts.upper).any()) {
      r.left_box = true;
      break;
    }
  }
  r.theta = theta;
  r.grad_norm = g.norm();
  r.logpl = pl.log_pl(theta);
  r.hessian = pl.hessian(theta);
  r.converged = !r.left_box && r.grad_norm <= opts.tolerance;
  if (r.left_box) {
    r.message = "estimate left the parameter box";
  } else if (!r.converged) {
    r.message = "gradient norm above tolerance after " + std::to_string(r.iterations) + " iterations";
  } else {
    r.message = "converged";
  }
  return r;
}

FitResult fit_mple(const Configuration& phi, const InteractionModel& model, const ObservationScheme& scheme,
                   const FitOptions& opts) {
  const double step = opts.grid_step > 0.0 ? opts.grid_step : default_grid_step(model, scheme.estimation_window);
  const QuadratureGrid grid = make_grid(scheme.estimation_window, step);
  return fit_mple(PseudoLikelihood(phi, model, scheme, grid), opts);
}

}  // namespace nngibbs
