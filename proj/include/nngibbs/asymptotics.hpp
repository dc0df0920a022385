#ifndef NNGIBBS_ASYMPTOTICS_HPP
#define NNGIBBS_ASYMPTOTICS_HPP

#include <vector>

#include "nngibbs/inference.hpp"

namespace nngibbs {

// Tiling of the estimation window by square cells of side D~, indexed
// row-major with half-open cells [x0, x0 + D~) x [y0, y0 + D~); points on the
// right or top window edge belong to the last cell.
class CellGrid {
 public:
  // Throws ParameterError unless both window sides are whole multiples of cell_size.
  CellGrid(const Window& window, double cell_size, double dependence_range);

  const Window& window() const { return window_; }
  double cell_size() const { return cell_; }
  double dependence_range() const { return range_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  // floor(D / D~) + 1.
  int neighbor_radius() const { return radius_; }
  // Cell index of a point inside the window.
  std::size_t cell_of(double x, double y) const;
  // Chebyshev distance between cell indices.
  int distance(std::size_t a, std::size_t b) const;

 private:
  Window window_;
  double cell_;
  double range_;
  int nx_ = 0;
  int ny_ = 0;
  int radius_ = 1;
};

// Per-cell score vectors s_i = sum_{nodes in cell} w u exp(-theta'u) - sum_{x in cell} u(x|phi\x).
std::vector<Vector> local_scores(const PseudoLikelihood& pl, const Vector& theta, const CellGrid& cells);
// Convenience form: the configuration's window is the full window and the cell grid's window the estimation window.
std::vector<Vector> local_scores(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                                 const CellGrid& cells, const QuadratureGrid& grid);

struct SigmaHat {
  Matrix value;
  std::size_t cells = 0;
  int neighbor_radius = 0;
  // Fewer than (2 r + 1)^2 cells, so the neighbourhood sum is truncated everywhere.
  bool small_window = false;
};

// |Lambda_n|^{-1} sum_i sum_{|j - i| <= r} s_i s_j', symmetrized.
SigmaHat sigma_hat(const std::vector<Vector>& scores, const CellGrid& cells);

// |Lambda_n|^{-1} H^{-1} Sigma H^{-1} with H the contrast Hessian of the fit.
Matrix estimator_covariance(const FitResult& fit, const Matrix& sigma);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// theta_j -/+ z_{(1 + level) / 2} sqrt(cov_jj).
std::vector<Interval> confidence_intervals(const Vector& theta, const Matrix& cov, double level);

// Largest step not above `step` that divides the cell size, so that every
// quadrature cell lies in exactly one block.
double aligned_grid_step(double step, double cell_size);

struct AnalysisOptions {
  FitOptions fit;
  double cell_size = 0.0;         // 0 selects the interaction range d_{p+1}
  double dependence_range = 0.0;  // 0 selects the interaction range d_{p+1}
  double level = 0.95;
};

struct Analysis {
  ObservationScheme scheme;
  FitResult fit;
  SigmaHat sigma;
  Matrix covariance;
  Vector std_errors;
  std::vector<Interval> intervals;
  double cell_size = 0.0;
  double dependence_range = 0.0;
  std::size_t cells = 0;
};

// Fit plus sandwich covariance and intervals. The covariance part is filled
// only when the fit converged.
Analysis analyze(const Configuration& phi, const InteractionModel& model, const ObservationScheme& scheme,
                 const AnalysisOptions& opts = {});

}  // namespace nngibbs

#endif  // NNGIBBS_ASYMPTOTICS_HPP
