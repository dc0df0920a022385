#include <cmath>

#include "doctest.h"
#include "nngibbs/asymptotics.hpp"
#include "nngibbs/sampler.hpp"
#include "oracles.hpp"

using namespace nngibbs;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("cell grid") {
  CellGrid g({0, 30, 0, 20}, 10, 15);
  CHECK(g.nx() == 3);
  CHECK(g.ny() == 2);
  CHECK(g.size() == 6);
  CHECK(g.neighbor_radius() == 2);
  CHECK(g.cell_of(0, 0) == 0);
  CHECK(g.cell_of(10, 0) == 1);
  CHECK(g.cell_of(9.999, 10) == 3);
  CHECK(g.cell_of(30, 20) == 5);
  CHECK(g.distance(0, 5) == 2);
  CHECK(CellGrid({0, 30, 0, 20}, 10, 0).neighbor_radius() == 1);
  CHECK_THROWS_AS(CellGrid({0, 25, 0, 20}, 10, 5), ParameterError);
  CHECK_THROWS_AS(g.cell_of(31, 0), ParameterError);
}

TEST_CASE("score regrouping and sigma-hat structure") {
  Rng rng(211);
  auto m = InteractionModel::beta_delaunay(0.2, BinBounds({0, 1, 2}));
  const Window full{0, 24, 0, 24};
  const auto phi = Configuration{oracle::uniform_points(rng, 300, 0.0, 24.0), full};
  const auto scheme = make_scheme(full, 2, 4);
  const auto grid = make_grid(scheme.estimation_window, 0.5);
  PseudoLikelihood pl(phi, m, scheme, grid);
  const Vector theta = vec({0.3, 1, 0.5});
  const Vector g = pl.gradient(theta);

  CellGrid many(scheme.estimation_window, 4, 2);
  auto s = local_scores(pl, theta, many);
  Vector total = Vector::Zero(3);
  for (const auto& v : s) total += v;
  CHECK((total + pl.area() * g).norm() <= 1e-9 * (pl.area() * g).norm());
  auto s2 = local_scores(phi, theta, m, many, grid);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK((s[i] - s2[i]).norm() <= 1e-12 * std::max(1.0, s[i].norm()));

  CellGrid one(scheme.estimation_window, scheme.estimation_window.width(), 2);
  auto s1 = local_scores(pl, theta, one);
  REQUIRE(s1.size() == 1);
  CHECK((s1[0] + pl.area() * g).norm() <= 1e-9 * s1[0].norm());
  auto sig1 = sigma_hat(s1, one);
  CHECK((sig1.value - s1[0] * s1[0].transpose() / pl.area()).norm() <= 1e-12 * sig1.value.norm());
  CHECK(sig1.small_window);
  Eigen::SelfAdjointEigenSolver<Matrix> e1(sig1.value);
  CHECK(e1.eigenvalues().minCoeff() >= -1e-10 * e1.eigenvalues().maxCoeff());
  CHECK(e1.eigenvalues()[1] <= 1e-9 * e1.eigenvalues().maxCoeff());

  CellGrid wide(scheme.estimation_window, 4, 100);
  auto sw = sigma_hat(local_scores(pl, theta, wide), wide);
  CHECK((sw.value - total * total.transpose() / pl.area()).norm() <= 1e-9 * sw.value.norm());

  auto sm = sigma_hat(s, many);
  CHECK((sm.value - sm.value.transpose()).norm() == 0.0);
  CHECK(sm.neighbor_radius == 1);
  CHECK(!sm.small_window);
}

TEST_CASE("empty Poisson pattern scores") {
  const Window w{0, 20, 0, 20};
  auto m = InteractionModel::none();
  CellGrid cells(w, 5, 1);
  auto s = local_scores({{}, w}, vec({0.7}), m, cells, make_grid(w, 0.5));
  for (const auto& v : s) CHECK(v[0] == doctest::Approx(25 * std::exp(-0.7)).epsilon(1e-12));
}

TEST_CASE("confidence intervals") {
  auto ci = confidence_intervals(vec({0.0, 3.0}), Matrix::Identity(2, 2), 0.95);
  CHECK(std::abs(ci[0].upper - 1.959964) < 1e-5);
  CHECK(std::abs(ci[0].lower + 1.959964) < 1e-5);
  CHECK(ci[1].upper - 3.0 == doctest::Approx(1.959964).epsilon(1e-6));
  auto narrow = confidence_intervals(vec({1.0}), Matrix::Identity(1, 1), 1e-12);
  CHECK(narrow[0].upper - narrow[0].lower < 1e-11);
  CHECK_THROWS_AS(confidence_intervals(vec({1.0}), Matrix::Identity(1, 1), 1.0), ParameterError);
}

TEST_CASE("sandwich covariance is symmetric PSD") {
  Rng rng(223);
  auto m = InteractionModel::beta_delaunay(0.05, BinBounds({0, 1, 2.5}));
  const Window full{0, 40, 0, 40};
  SamplerConfig cfg;
  cfg.sim_window = full;
  cfg.n_steps = 100000;
  cfg.move_stddev = 0.5;
  for (int rep = 0; rep < 4; ++rep) {
    cfg.seed = stream_seed(225, rep);
    const auto phi = run(vec({-1, 0.5, 0.3}), m, cfg);
    AnalysisOptions opts;
    opts.fit.grid_step = 0.25;
    opts.cell_size = 4;
    opts.dependence_range = 2.5;
    const auto a = analyze(phi, m, make_scheme(full, 4, 4), opts);
    REQUIRE(a.fit.converged);
    CHECK((a.covariance - a.covariance.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> e(a.covariance);
    CHECK(e.eigenvalues().minCoeff() >= -1e-10);
    CHECK(a.std_errors.size() == 3);
    CHECK(a.intervals.size() == 3);
  }
}

TEST_CASE("Poisson sigma-hat is stable under doubling the cell size") {
  Rng rng(227);
  auto m = InteractionModel::none();
  const Window w{0, 80, 0, 80};
  const double theta1 = 0.5;
  double small = 0, large = 0;
  const int reps = 200;
  for (int k = 0; k < reps; ++k) {
    const auto phi = simulate_poisson(w, std::exp(-theta1), rng);
    PseudoLikelihood pl(phi, m, make_scheme(w, 0), make_grid(w, 1.0));
    CellGrid c5(w, 5, 0), c10(w, 10, 0);
    small += sigma_hat(local_scores(pl, vec({theta1}), c5), c5).value(0, 0);
    large += sigma_hat(local_scores(pl, vec({theta1}), c10), c10).value(0, 0);
  }
  CHECK(std::abs(small - large) < 0.15 * large);
  CHECK(small / reps == doctest::Approx(std::exp(-theta1)).epsilon(0.15));
}

TEST_CASE("standard errors shrink with the window") {
  Rng rng(229);
  auto m = InteractionModel::none();
  const double theta1 = 0.0;
  std::vector<double> se;
  for (double side : {20.0, 40.0, 80.0}) {
    const Window w{0, side, 0, side};
    double acc = 0;
    const int reps = 40;
    for (int k = 0; k < reps; ++k) {
      const auto phi = simulate_poisson(w, std::exp(-theta1), rng);
      AnalysisOptions opts;
      opts.cell_size = 2;
      opts.dependence_range = 1;
      opts.fit.grid_step = 1;
      acc += analyze(phi, m, make_scheme(w, 0), opts).std_errors[0];
    }
    se.push_back(acc / reps);
    MESSAGE("side " << side << " mean se " << acc / reps);
  }
  CHECK(se[0] / se[1] == doctest::Approx(2.0).epsilon(0.25));
  CHECK(se[1] / se[2] == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("quadrature steps align with cells") {
  CHECK(aligned_grid_step(1.0, 2.5) == doctest::Approx(2.5 / 3));
  CHECK(aligned_grid_step(5.0, 100.0) == 5.0);
  CHECK(aligned_grid_step(30.0, 20.0) == 20.0);
  const Window w{0, 10, 0, 10};
  PseudoLikelihood pl({{}, w}, InteractionModel::none(), make_scheme(w, 0), make_grid(w, 1.0));
  CHECK_THROWS_AS(local_scores(pl, vec({0.0}), CellGrid(w, 2.5, 1)), ParameterError);
  CHECK_NOTHROW(local_scores(pl, vec({0.0}), CellGrid(w, 10, 1)));
}
