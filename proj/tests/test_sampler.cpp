#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nngibbs/sampler.hpp"

using namespace nngibbs;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SamplerConfig config(const Window& w, std::uint64_t steps, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.sim_window = w;
  cfg.n_steps = steps;
  cfg.seed = seed;
  cfg.move_stddev = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("sampler config validation") {
  SamplerConfig cfg = config({0, 1, 0, 1}, 0, 1);
  CHECK_NOTHROW(cfg.validate());
  cfg.p_move = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = config({0, 1, 0, 1}, 0, 1);
  cfg.p_birth = -0.1;
  cfg.p_death = 0.8;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = config({1, 0, 0, 1}, 0, 1);
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("acceptance ratio algebra") {
  const double area = 123.5;
  for (double dv : {-3.0, 0.0, 0.7, 5.0}) {
    for (std::size_t n : {0u, 1u, 7u}) {
      for (double pb : {0.35, 0.2}) {
        const double pd = 0.7 - pb;
        const double fwd = log_birth_ratio(area, n, dv, pb, pd);
        const double bwd = log_death_ratio(area, n + 1, dv, pb, pd);
        CHECK(fwd == doctest::Approx(-bwd).epsilon(1e-14));
        // Target density ratio pi(phi + x) / pi(phi) = exp(-dv) against proposal ratio.
        const double target = -dv;
        const double proposal = std::log(pd / (n + 1.0)) - std::log(pb / area);
        CHECK(fwd == doctest::Approx(target + proposal).epsilon(1e-14));
      }
    }
  }
  // Death from a one-point state followed by birth back.
  const double dv = 1.3;
  const double death = std::exp(log_death_ratio(area, 1, dv, 0.35, 0.35));
  const double birth = std::exp(log_birth_ratio(area, 0, dv, 0.35, 0.35));
  CHECK(birth / death == doctest::Approx(std::exp(-2 * dv) * area * area).epsilon(1e-12));
  CHECK(birth == doctest::Approx(std::exp(-dv) * area).epsilon(1e-12));
  CHECK(log_move_ratio(2.0, 0.5) == -1.5);
  CHECK(log_move_ratio(2.0, 0.5) + log_move_ratio(0.5, 2.0) == 0.0);
}

TEST_CASE("zero steps and determinism") {
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds({0, 2, 6}));
  const Window w{0, 40, 0, 40};
  CHECK(run(vec({0, 2, 4}), m, config(w, 0, 5)).empty());
  const auto a = run(vec({0, 2, 4}), m, config(w, 20000, 5));
  const auto b = run(vec({0, 2, 4}), m, config(w, 20000, 5));
  const auto c = run(vec({0, 2, 4}), m, config(w, 20000, 6));
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) same = same && a.points[i].x == b.points[i].x && a.points[i].y == b.points[i].y;
  CHECK(same);
  CHECK(!a.empty());
  bool differs = a.size() != c.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = a.points[i].x != c.points[i].x;
  CHECK(differs);
}

TEST_CASE("Poisson reference intensity") {
  auto m = InteractionModel::none();
  const Window w{0, 20, 0, 20};
  for (double theta1 : {0.0, 1.0}) {
    SamplerConfig cfg = config(w, 0, 11);
    ChainState state(m, w, vec({theta1}));
    Rng rng(11);
    run_chain(state, cfg, rng, 20000);
    double total = 0;
    const int samples = 400;
    for (int k = 0; k < samples; ++k) {
      run_chain(state, cfg, rng, 500);
      total += static_cast<double>(state.pattern().size());
    }
    const double mean = total / samples;
    const double expect = w.area() * std::exp(-theta1);
    CHECK(std::abs(mean - expect) < 0.05 * expect);
  }
}

TEST_CASE("inhibition lowers the point count") {
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds({0, 2, 8}));
  const Window w{0, 30, 0, 30};
  double total = 0;
  const int chains = 50;
  for (int k = 0; k < chains; ++k) {
    const auto phi = run(vec({0, 2, 4}), m, config(w, 5000, stream_seed(9, k)));
    total += static_cast<double>(phi.size());
  }
  CHECK(total / chains < w.area());
}

TEST_CASE("geometry and energy stay coherent along the chain") {
  auto m = InteractionModel::beta_delaunay(0.2, BinBounds({0, 1.5, 3}));
  const Window w{0, 15, 0, 15};
  SamplerConfig cfg = config(w, 0, 3);
  cfg.energy_recompute_period = 500;
  cfg.verify_geometry = true;
  ChainState state(m, w, vec({0.5, 1, 0.5}));
  Rng rng(3);
  CHECK_NOTHROW(run_chain(state, cfg, rng, 30000));
  CHECK(state.counters().recomputes == 60);
  CHECK(state.counters().max_energy_drift < 1e-9);
  CHECK(state.counters().accepted[2] > 0);
  CHECK(std::abs(state.cached_energy() - energy(state.configuration(), state.theta(), m)) < 1e-9);
}

TEST_CASE("hard core is never violated") {
  auto m = InteractionModel::complete(BinBounds({0, 1, 2}), 0.8);
  const Window w{0, 10, 0, 10};
  SamplerConfig cfg = config(w, 0, 13);
  cfg.move_stddev = 0.5;
  ChainState state(m, w, vec({-2, 0.2, 0.1}));
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    run_chain(state, cfg, rng, 300);
    REQUIRE(state.pattern().admissible());
    REQUIRE(std::isfinite(energy(state.configuration(), state.theta(), m)));
  }
  CHECK(state.pattern().size() > 20);
}

TEST_CASE("GNZ residual") {
  CHECK_THROWS_AS(gnz_residual({}, [](const Point2&, const Stats&) { return 1.0; }, vec({0}), InteractionModel::none(),
                               {0, 1, 0, 1}),
                  ParameterError);

  const Window w{0, 10, 0, 10};
  auto poisson = InteractionModel::none();
  std::vector<Configuration> samples;
  for (int k = 0; k < 100; ++k) samples.push_back(run(vec({0}), poisson, config(w, 3000, stream_seed(21, k))));
  auto one = [](const Point2&, const Stats&) { return 1.0; };
  auto r = gnz_residual(samples, one, vec({0}), poisson, w, {1.0, 4, 1});
  CHECK(std::abs(r.t()) < 4);
  double mean_count = 0;
  for (const auto& s : samples) mean_count += static_cast<double>(s.size());
  CHECK(r.statistic == doctest::Approx(mean_count / 100 - 100).epsilon(1e-9));

  auto m = InteractionModel::beta_delaunay(0.1, BinBounds({0, 1, 3}));
  const Vector theta = vec({0, 1, 2});
  std::vector<Configuration> chain_samples;
  for (int k = 0; k < 100; ++k) chain_samples.push_back(run(theta, m, config(w, 8000, stream_seed(33, k))));
  auto u2 = [](const Point2&, const Stats& u) { return u[1]; };
  auto u3 = [](const Point2&, const Stats& u) { return u[2]; };
  auto rs = gnz_residuals(chain_samples, {one, u2, u3}, theta, m, w, {0.5, 7, 1});
  for (const auto& res : rs) CHECK(std::abs(res.t()) < 4);

  const Vector wrong = vec({3, 0, 0});
  auto bad = gnz_residuals(chain_samples, {one, u2, u3}, wrong, m, w, {0.5, 7, 1});
  double worst = 0;
  for (const auto& res : bad) worst = std::max(worst, std::abs(res.t()));
  CHECK(worst > 4);

  auto single = gnz_residual({chain_samples.front()}, one, theta, m, w, {0.5, 7, 1});
  CHECK(std::isinf(single.std_error));
  CHECK(single.t() == 0.0);
}
