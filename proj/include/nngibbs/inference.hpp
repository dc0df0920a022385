#ifndef NNGIBBS_INFERENCE_HPP
#define NNGIBBS_INFERENCE_HPP

#include <string>
#include <vector>

#include "nngibbs/model.hpp"

namespace nngibbs {

struct QuadratureGrid {
  std::vector<Point2> nodes;
  std::vector<double> weights;
  Window window;
  double step = 0.0;
  double total_weight() const;
};

// Midpoint rule on a regular step x step grid anchored at the lower-left
// corner; the last row and column are clipped to the window and carry their
// partial area. Node ids are 0..N-1.
QuadratureGrid make_grid(const Window& window, double step);

// Finest positive bin width over 4, capped by half the hard-core distance;
// a fiftieth of the shorter window side when the model has no bins.
double default_grid_step(const InteractionModel& model, const Window& window);

struct ObservationScheme {
  Window full_window;
  Window estimation_window;
  double border = 0.0;
  // Throws ParameterError unless estimation_window dilated by border lies inside full_window.
  void validate() const;
};

// Estimation window = full window eroded by `border`.
ObservationScheme make_scheme(const Window& full_window, double border);
// As above, then shrunk symmetrically so both sides are whole multiples of cell_size.
ObservationScheme make_scheme(const Window& full_window, double border, double cell_size);
// Shrinks the estimation window about its centre to whole multiples of the
// cell size; the clipped margin joins the border.
ObservationScheme align_to_cells(const ObservationScheme& scheme, double cell_size);

// All theta-independent ingredients of the log-pseudo-likelihood: one-point
// statistics at every admissible quadrature node and at every data point of
// the estimation window. The pattern conditions every statistic, including
// points in the border.
class PseudoLikelihood {
 public:
  struct Row {
    Point2 at;
    Stats u;
    double weight;  // quadrature weight; 1 for data rows
  };

  PseudoLikelihood(const Configuration& phi, const InteractionModel& model, const ObservationScheme& scheme,
                   const QuadratureGrid& grid);

  int dim() const { return dim_; }
  double area() const { return area_; }
  const ObservationScheme& scheme() const { return scheme_; }
  const std::vector<Row>& node_rows() const { return nodes_; }
  const std::vector<Row>& data_rows() const { return data_; }
  // Nodes dropped because they violate the hard core (zero conditional intensity).
  std::size_t excluded_nodes() const { return excluded_; }
  // False when the data violate the hard core, in which case log_pl is -infinity.
  bool admissible() const { return admissible_; }
  double grid_step() const { return grid_step_; }
  const Vector& data_sum() const { return data_sum_; }

  // -sum_nodes w exp(-theta'u) - sum_x theta'u(x|phi\x).
  double log_pl(const Vector& theta) const;
  // U_n = -log_pl / |Lambda_n|.
  double contrast(const Vector& theta) const;
  // Gradient of U_n: |Lambda_n|^{-1} [sum_x u(x|phi\x) - sum_nodes w u exp(-theta'u)].
  Vector gradient(const Vector& theta) const;
  // Hessian of U_n: |Lambda_n|^{-1} sum_nodes w u u' exp(-theta'u).
  Matrix hessian(const Vector& theta) const;

 private:
  int dim_ = 0;
  double area_ = 0.0;
  double grid_step_ = 0.0;
  ObservationScheme scheme_;
  std::vector<Row> nodes_;
  std::vector<Row> data_;
  std::size_t excluded_ = 0;
  bool admissible_ = true;
  Vector data_sum_;
  // Node rows merged by identical statistic vector.
  Matrix unique_u_;
  Vector unique_w_;
};

double log_pl(const Configuration& phi, const Vector& theta, const InteractionModel& model,
              const ObservationScheme& scheme, const QuadratureGrid& grid);
Vector grad_contrast(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                     const ObservationScheme& scheme, const QuadratureGrid& grid);
Matrix hessian_contrast(const Configuration& phi, const Vector& theta, const InteractionModel& model,
                        const ObservationScheme& scheme, const QuadratureGrid& grid);

struct FitOptions {
  // Quadrature step; 0 selects default_grid_step.
  double grid_step = 0.0;
  // Parameter box Theta = (lower, upper)^{p+1}.
  double lower = -20.0;
  double upper = 20.0;
  double tolerance = 1e-8;
  int max_iterations = 100;
  int max_halvings = 30;
};

struct FitResult {
  Vector theta;
  double logpl = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  // Hessian of the contrast U_n^(2) at theta (already divided by |Lambda_n|).
  Matrix hessian;
  bool converged = false;
  bool left_box = false;
  std::string message;
  double area = 0.0;
  double grid_step = 0.0;
  std::size_t data_points = 0;
  std::size_t nodes = 0;
};

// Newton's method with step halving on U_n from theta = 0. Throws
// IdentifiabilityError when the estimation window holds no data point and
// RankDeficiencyError when some statistic is absent from the data or the
// Hessian is singular.
FitResult fit_mple(const PseudoLikelihood& pl, const FitOptions& opts = {});
FitResult fit_mple(const Configuration& phi, const InteractionModel& model, const ObservationScheme& scheme,
                   const FitOptions& opts = {});

}  // namespace nngibbs

#endif  // NNGIBBS_INFERENCE_HPP
