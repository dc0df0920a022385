#include "nngibbs/asymptotics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdlib>

namespace nngibbs {

namespace {

int whole_cells(double side, double cell) {
  const double n = side / cell;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, n)) {
    throw ParameterError("window side " + std::to_string(side) + " is not a whole multiple of the cell size " +
                         std::to_string(cell));
  }
  return static_cast<int>(r);
}

bool divides(double step, double cell) {
  const double n = cell / step;
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n);
}

}  // namespace

double aligned_grid_step(double step, double cell_size) {
  if (!(step > 0.0) || !(cell_size > 0.0)) throw ParameterError("step and cell size must be positive");
  return cell_size / std::ceil(cell_size / step - 1e-9);
}

CellGrid::CellGrid(const Window& window, double cell_size, double dependence_range)
    : window_(window), cell_(cell_size), range_(dependence_range) {
  validate_window(window);
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw ParameterError("cell size must be positive");
  if (!(dependence_range >= 0.0) || !std::isfinite(dependence_range)) {
    throw ParameterError("dependence range must be nonnegative");
  }
  nx_ = whole_cells(window.width(), cell_size);
  ny_ = whole_cells(window.height(), cell_size);
  radius_ = static_cast<int>(std::floor(dependence_range / cell_size)) + 1;
}

std::size_t CellGrid::cell_of(double x, double y) const {
  if (!window_.contains(x, y)) throw ParameterError("point outside the cell grid");
  const int i = std::min(nx_ - 1, static_cast<int>(std::floor((x - window_.xmin) / cell_)));
  const int j = std::min(ny_ - 1, static_cast<int>(std::floor((y - window_.ymin) / cell_)));
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
}

int CellGrid::distance(std::size_t a, std::size_t b) const {
  const int ai = static_cast<int>(a % nx_), aj = static_cast<int>(a / nx_);
  const int bi = static_cast<int>(b % nx_), bj = static_cast<int>(b / nx_);
  return std::max(std::abs(ai - bi), std::abs(aj - bj));
}

std::vector<Vector> local_scores(const PseudoLikelihood& pl, const Vector& theta, const CellGrid& cells) {
  if (!(pl.scheme().estimation_window == cells.window())) {
    throw ParameterError("cell grid must tile the estimation window of the pseudo-likelihood");
  }
  if (theta.size() != pl.dim()) throw ParameterError("theta has the wrong dimension");
  if (cells.size() > 1 && !divides(pl.grid_step(), cells.cell_size())) {
    throw ParameterError("quadrature step must divide the cell size");
  }
  std::vector<Vector> s(cells.size(), Vector::Zero(pl.dim()));
  for (const auto& r : pl.node_rows()) {
    s[cells.cell_of(r.at.x, r.at.y)] += r.weight * std::exp(-theta.dot(r.u)) * r.u;
  }
  for (const auto& r : pl.data_rows()) s[cells.cell_of(r.at.x, r.at.y)] -= r.u;
  return s;
}

std::vector<Vector> local_scores(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                                 const CellGrid& cells, const QuadratureGrid& grid) {
  const Window& full = phi.window;
  const Window& est = cells.window();
  const double border = std::min({est.xmin - full.xmin, full.xmax - est.xmax, est.ymin - full.ymin, full.ymax - est.ymax});
  const ObservationScheme scheme{full, est, std::max(0.0, border)};
  return local_scores(PseudoLikelihood(phi, model, scheme, grid), theta, cells);
}

SigmaHat sigma_hat(const std::vector<Vector>& scores, const CellGrid& cells) {
  if (scores.size() != cells.size()) throw ParameterError("one score vector per cell is required");
  if (scores.empty()) throw ParameterError("no cells");
  const Eigen::Index k = scores.front().size();
  Matrix acc = Matrix::Zero(k, k);
  const int r = cells.neighbor_radius();
  for (int ai = 0; ai < cells.nx(); ++ai) {
    for (int aj = 0; aj < cells.ny(); ++aj) {
      const Vector& si = scores[static_cast<std::size_t>(aj) * cells.nx() + ai];
      Vector nsum = Vector::Zero(k);
      for (int bi = std::max(0, ai - r); bi <= std::min(cells.nx() - 1, ai + r); ++bi) {
        for (int bj = std::max(0, aj - r); bj <= std::min(cells.ny() - 1, aj + r); ++bj) {
          nsum += scores[static_cast<std::size_t>(bj) * cells.nx() + bi];
        }
      }
      acc += si * nsum.transpose();
    }
  }
  SigmaHat out;
  out.value = 0.5 * (acc + acc.transpose()) / cells.window().area();
  out.cells = cells.size();
  out.neighbor_radius = r;
  const std::size_t full = static_cast<std::size_t>(2 * r + 1) * static_cast<std::size_t>(2 * r + 1);
  out.small_window = cells.size() < full;
  return out;
}

Matrix estimator_covariance(const FitResult& fit, const Matrix& sigma) {
  const Eigen::Index k = fit.hessian.rows();
  if (k == 0 || sigma.rows() != k || sigma.cols() != k) throw ParameterError("covariance inputs have mismatched sizes");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.hessian);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
    Eigen::Index j = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&j);
    throw RankDeficiencyError("contrast Hessian is singular", static_cast<int>(j));
  }
  const Matrix hinv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  Matrix cov = hinv * sigma * hinv / fit.area;
  return 0.5 * (cov + cov.transpose());
}

std::vector<Interval> confidence_intervals(const Vector& theta, const Matrix& cov, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("confidence level must lie in (0, 1)");
  if (cov.rows() != theta.size() || cov.cols() != theta.size()) throw ParameterError("covariance has the wrong size");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
  std::vector<Interval> out;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double half = z * std::sqrt(std::max(0.0, cov(j, j)));
    out.push_back({theta[j] - half, theta[j] + half});
  }
  return out;
}

Analysis analyze(const Configuration& phi, const InteractionModel& model, const ObservationScheme& scheme,
                 const AnalysisOptions& opts) {
  Analysis a;
  a.cell_size = opts.cell_size > 0.0 ? opts.cell_size : model.range();
  a.dependence_range = opts.dependence_range > 0.0 ? opts.dependence_range : model.range();
  if (!(a.cell_size > 0.0)) {
    a.cell_size = std::min(scheme.estimation_window.width(), scheme.estimation_window.height());
  }
  a.scheme = align_to_cells(scheme, a.cell_size);
  const Window& est = a.scheme.estimation_window;
  const double step =
      aligned_grid_step(opts.fit.grid_step > 0.0 ? opts.fit.grid_step : default_grid_step(model, est), a.cell_size);
  const PseudoLikelihood pl(phi, model, a.scheme, make_grid(est, step));
  a.fit = fit_mple(pl, opts.fit);
  const CellGrid cells(est, a.cell_size, a.dependence_range);
  a.cells = cells.size();
  if (!a.fit.converged) return a;
  a.sigma = sigma_hat(local_scores(pl, a.fit.theta, cells), cells);
  a.covariance = estimator_covariance(a.fit, a.sigma.value);
  a.std_errors = a.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  a.intervals = confidence_intervals(a.fit.theta, a.covariance, opts.level);
  return a;
}

}  // namespace nngibbs
