#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "nngibbs/model.hpp"
#include "oracles.hpp"

using namespace nngibbs;

namespace {

std::vector<double> as_vec(const Stats& u) { return std::vector<double>(u.data(), u.data() + u.size()); }

Configuration config_of(const std::vector<Point2>& pts, const Window& w) { return Configuration{pts, w}; }

}  // namespace

TEST_CASE("bin bounds") {
  BinBounds b({0, 20, 80});
  CHECK(b.dim() == 3);
  CHECK(b.bin_of(0.0) == -1);
  CHECK(b.bin_of(1e-9) == 1);
  CHECK(b.bin_of(20.0) == 1);
  CHECK(b.bin_of(20.0000001) == 2);
  CHECK(b.bin_of(80.0) == 2);
  CHECK(b.bin_of(80.0000001) == -1);
  CHECK(b.finest_width() == 20.0);
  CHECK_THROWS_AS(BinBounds({1, 2}), ParameterError);
  CHECK_THROWS_AS(BinBounds({0, 20, 20}), ParameterError);
  CHECK_THROWS_AS(BinBounds(std::vector<double>{}), ParameterError);
}

TEST_CASE("model construction and locality radius") {
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds({0, 20, 80}));
  CHECK(m.dim() == 3);
  CHECK(m.triangle_radius() == doctest::Approx(80.0 / std::sin(0.1)));
  CHECK(m.locality_radius() == doctest::Approx(160.0 / std::sin(0.1)));
  CHECK(InteractionModel::complete(BinBounds({0, 20, 80})).locality_radius() == 80.0);
  CHECK(InteractionModel::none().dim() == 1);
  CHECK_THROWS_AS(InteractionModel::beta_delaunay(1.2, BinBounds({0, 1})), ParameterError);
  CHECK_THROWS_AS(InteractionModel::beta_delaunay(0.0, BinBounds({0, 1})), ParameterError);
  CHECK_THROWS_AS(InteractionModel::complete(BinBounds({0, 1}), -1.0), ParameterError);
  CHECK(parse_graph_kind("beta-delaunay") == GraphKind::BetaDelaunay);
  CHECK_THROWS_AS(parse_graph_kind("knn"), ParameterError);
}

TEST_CASE("sufficient statistics examples") {
  const Window w{0, 100, 0, 100};
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds({0, 20, 80}));
  CHECK(as_vec(suff_stats(config_of({}, w), m)) == std::vector<double>{0, 0, 0});
  CHECK(as_vec(suff_stats(config_of({{5, 5, 0}}, w), m)) == std::vector<double>{1, 0, 0});

  auto c = InteractionModel::complete(BinBounds({0, 20, 80}));
  Rng rng(61);
  auto pts = oracle::uniform_points(rng, 30, 0.0, 100.0);
  Stats u = suff_stats(config_of(pts, w), c);
  double near = 0, mid = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double r = std::sqrt(squared_distance(pts[i], pts[j]));
      if (r <= 20) ++near;
      else if (r <= 80) ++mid;
    }
  CHECK(u[0] == 30);
  CHECK(u[1] == near);
  CHECK(u[2] == mid);
}

TEST_CASE("identifiability configuration") {
  const std::vector<double> d{0, 20, 80};
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds(d));
  const Window w{-100, 100, -100, 100};
  const Vector theta = (Vector(3) << 0, 2, 4).finished();
  for (int j = 1; j <= 2; ++j) {
    const double r = 0.5 * (d[j - 1] + d[j]);
    const Point2 c1{r, 0, 1}, c2{r * 0.5, r * std::sqrt(3.0) / 2.0, 2};
    Stats u = local_stats({0, 0, 0}, config_of({c1, c2}, w), m);
    Stats expect = Stats::Zero(3);
    expect[0] = 1;
    expect[j] = 3;
    CHECK(as_vec(u) == as_vec(expect));
    if (j == 1) CHECK(local_energy({0, 0, 0}, config_of({c1, c2}, w), theta, m) == 6.0);
  }
  Stats u0 = local_stats({1, 1, 0}, config_of({}, w), m);
  CHECK(as_vec(u0) == std::vector<double>{1, 0, 0});
  const Vector t2 = (Vector(3) << 0.7, 2, 4).finished();
  CHECK(local_energy({1, 1, 0}, config_of({}, w), t2, m) == 0.7);
  CHECK(energy(config_of({}, w), t2, m) == 0.0);
  CHECK(energy(config_of({{1, 1, 0}}, w), theta, m) == 0.0);
}

TEST_CASE("local stats equal the difference of sufficient statistics") {
  Rng rng(67);
  const Window w{0, 30, 0, 30};
  int cases = 0;
  for (const std::string graph : {"beta-delaunay", "complete"}) {
    for (int rep = 0; rep < 30; ++rep) {
      const double beta0 = rng.uniform(0.05, 0.8);
      const std::vector<double> d{0, 2, 4, 7};
      auto m = graph == "complete" ? InteractionModel::complete(BinBounds(d))
                                   : InteractionModel::beta_delaunay(beta0, BinBounds(d));
      auto pts = oracle::uniform_points(rng, rng.below(101), 0.0, 30.0);
      PatternState state(m, config_of(pts, w));
      const auto base = oracle::brute_stats(pts, graph, beta0, d);
      REQUIRE(as_vec(state.suff_stats()) == base);
      for (int k = 0; k < 20; ++k) {
        const Point2 x{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0), PointId(1000 + k)};
        auto with = pts;
        with.push_back(x);
        const auto after = oracle::brute_stats(with, graph, beta0, d);
        std::vector<double> diff(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) diff[i] = after[i] - base[i];
        REQUIRE(as_vec(state.local_stats(x)) == diff);
        ++cases;
      }
      for (int k = 0; k < 5 && !pts.empty(); ++k) {
        const Point2 y = pts[rng.below(pts.size())];
        std::vector<Point2> without;
        for (const auto& q : pts)
          if (q.id != y.id) without.push_back(q);
        const auto reduced = oracle::brute_stats(without, graph, beta0, d);
        std::vector<double> diff(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) diff[i] = base[i] - reduced[i];
        REQUIRE(as_vec(state.removal_stats(y.id)) == diff);
      }
    }
  }
  CHECK(cases >= 1000);
}

TEST_CASE("telescoping energy") {
  Rng rng(71);
  const Window w{0, 40, 0, 40};
  const std::vector<double> d{0, 3, 6};
  auto m = InteractionModel::beta_delaunay(0.2, BinBounds(d));
  for (int rep = 0; rep < 20; ++rep) {
    auto pts = oracle::uniform_points(rng, 1 + rng.below(50), 0.0, 40.0);
    const Vector theta = Vector::Random(3) * 3.0;
    const double total = energy(config_of(pts, w), theta, m);
    for (int order = 0; order < 3; ++order) {
      for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[rng.below(i)]);
      PatternState state(m, w);
      double sum = 0.0;
      for (const auto& p : pts) {
        sum += theta.dot(state.local_stats(p));
        state.insert(p);
      }
      CHECK(std::abs(sum - total) <= 1e-9 * std::max(1.0, std::abs(total)));
    }
  }
}

TEST_CASE("translation invariance") {
  Rng rng(73);
  const std::vector<double> d{0, 3, 6};
  for (const auto& m : {InteractionModel::beta_delaunay(0.2, BinBounds(d)), InteractionModel::complete(BinBounds(d))}) {
    for (int rep = 0; rep < 20; ++rep) {
      auto pts = oracle::dyadic_points(rng, 1 + rng.below(60), 0.0, 30.0);
      const double tx = std::floor(rng.uniform(-500, 500)), ty = std::floor(rng.uniform(-500, 500));
      auto moved = pts;
      for (auto& p : moved) {
        p.x += tx;
        p.y += ty;
      }
      const Window w{0, 30, 0, 30};
      PatternState a(m, config_of(pts, w)), b(m, config_of(moved, w.translated(tx, ty)));
      CHECK(as_vec(a.suff_stats()) == as_vec(b.suff_stats()));
      for (int k = 0; k < 10; ++k) {
        const Point2 x{std::floor(rng.uniform(0, 30) * 1024) / 1024 + 1.0 / 2048, std::floor(rng.uniform(0, 30) * 1024) / 1024,
                       PointId(999)};
        const Point2 xt{x.x + tx, x.y + ty, x.id};
        CHECK(as_vec(a.local_stats(x)) == as_vec(b.local_stats(xt)));
      }
    }
  }
}

TEST_CASE("locality radius") {
  Rng rng(79);
  int cases = 0, mismatches = 0;
  const std::vector<double> d{0, 1, 2};
  for (int rep = 0; rep < 40; ++rep) {
    const double beta0 = rng.uniform(0.1, 1.0);
    auto m = rep % 2 ? InteractionModel::complete(BinBounds(d)) : InteractionModel::beta_delaunay(beta0, BinBounds(d));
    const double radius = m.locality_radius();
    auto pts = oracle::uniform_points(rng, 300, 0.0, 40.0);
    const Window w{0, 40, 0, 40};
    PatternState full(m, config_of(pts, w));
    for (int k = 0; k < 25; ++k) {
      const Point2 x{rng.uniform(0, 40), rng.uniform(0, 40), PointId(5000)};
      std::vector<Point2> near;
      for (const auto& p : pts)
        if (std::sqrt(squared_distance(p, x)) <= radius) near.push_back(p);
      PatternState local(m, config_of(near, w));
      if (as_vec(full.local_stats(x)) != as_vec(local.local_stats(x))) ++mismatches;
      ++cases;
    }
  }
  CHECK(cases >= 1000);
  CHECK(mismatches == 0);
}

TEST_CASE("the circumdiameter bound alone does not give locality") {
  Rng rng(79);
  int mismatches = 0;
  const std::vector<double> d{0, 1, 2};
  for (int rep = 0; rep < 40; ++rep) {
    auto m = InteractionModel::beta_delaunay(rng.uniform(0.1, 1.0), BinBounds(d));
    auto pts = oracle::uniform_points(rng, 300, 0.0, 40.0);
    PatternState full(m, config_of(pts, {0, 40, 0, 40}));
    for (int k = 0; k < 25; ++k) {
      const Point2 x{rng.uniform(0, 40), rng.uniform(0, 40), PointId(5000)};
      std::vector<Point2> near;
      for (const auto& p : pts)
        if (std::sqrt(squared_distance(p, x)) <= m.triangle_radius()) near.push_back(p);
      PatternState local(m, config_of(near, {0, 40, 0, 40}));
      if (as_vec(full.local_stats(x)) != as_vec(local.local_stats(x))) ++mismatches;
    }
  }
  CHECK(mismatches > 0);
}

TEST_CASE("bins partition the short edges") {
  Rng rng(83);
  const std::vector<double> d{0, 1.5, 2.5, 4};
  auto m = InteractionModel::beta_delaunay(0.3, BinBounds(d));
  auto pts = oracle::uniform_points(rng, 200, 0.0, 20.0);
  PatternState state(m, config_of(pts, {0, 20, 0, 20}));
  const Stats u = state.suff_stats();
  std::size_t short_edges = 0;
  for (const auto& e : state.triangulation()->beta_edges(BetaThreshold(0.3)))
    if (e.length <= 4.0) ++short_edges;
  CHECK(u.tail(3).sum() == double(short_edges));
}

TEST_CASE("hard core") {
  const Window w{0, 10, 0, 10};
  auto m = InteractionModel::beta_delaunay(0.2, BinBounds({0, 2}), 0.5);
  const Vector theta = (Vector(2) << 0, 1).finished();
  std::vector<Point2> ok{{1, 1, 0}, {2, 1, 1}, {1.5, 2, 2}};
  CHECK(std::isfinite(energy(config_of(ok, w), theta, m)));
  auto bad = ok;
  bad.push_back({1.2, 1.2, 3});
  CHECK(energy(config_of(bad, w), theta, m) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(suff_stats(config_of(bad, w), m), InadmissibleConfigurationError);
  CHECK(local_energy({1.3, 1, 4}, config_of(ok, w), theta, m) == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(local_energy({5, 5, 4}, config_of(ok, w), theta, m)));

  Rng rng(89);
  for (int rep = 0; rep < 50; ++rep) {
    auto pts = oracle::uniform_points(rng, 30, 0.0, 10.0);
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) closest = std::min(closest, std::sqrt(squared_distance(pts[i], pts[j])));
    auto hm = InteractionModel::complete(BinBounds({0, 2}), 0.6);
    CHECK(std::isinf(energy(config_of(pts, w), theta, hm)) == (closest < 0.6));
  }
}

TEST_CASE("duplicate query points") {
  const Window w{0, 10, 0, 10};
  std::vector<Point2> pts{{1, 1, 0}, {2, 1, 1}, {1.5, 2, 2}};
  for (const auto& m : {InteractionModel::beta_delaunay(0.2, BinBounds({0, 2})), InteractionModel::complete(BinBounds({0, 2}))}) {
    CHECK_THROWS_AS(local_stats({2, 1, 7}, config_of(pts, w), m), DuplicatePointError);
    CHECK_THROWS_AS(local_stats({3, 3, 1}, config_of(pts, w), m), DuplicatePointError);
  }
}

TEST_CASE("stability scan") {
  Rng rng(97);
  const std::vector<double> d{0, 2, 5};
  auto m = InteractionModel::beta_delaunay(0.1, BinBounds(d));
  const Vector theta = (Vector(3) << 0, 2, 4).finished();
  std::vector<StabilitySample> samples;
  for (int rep = 0; rep < 400; ++rep) {
    auto pts = oracle::uniform_points(rng, rng.below(201), 0.0, 30.0);
    samples.push_back({{rng.uniform(0, 30), rng.uniform(0, 30), PointId(10000)}, config_of(pts, {0, 30, 0, 30})});
  }
  const auto bounds = default_stability_bounds(m);
  const auto report = check_stability(m, theta, samples, bounds);
  CHECK(report.cases == samples.size());
  CHECK(report.k == doctest::Approx(6.0 * 6.0));
  for (int i = 1; i < 3; ++i) CHECK(report.min_u[i] >= -bounds.k1[i]);
  CHECK(report.min_local_energy >= -report.k);
  CHECK(report.ok());

  std::vector<StabilitySample> empty_cases;
  for (int k = 0; k < 20; ++k) empty_cases.push_back({{rng.uniform(0, 30), rng.uniform(0, 30), 0}, config_of({}, {0, 30, 0, 30})});
  const auto r0 = check_stability(m, theta, empty_cases, bounds);
  CHECK(as_vec(r0.min_u) == std::vector<double>{1, 0, 0});
  CHECK(as_vec(r0.max_u) == std::vector<double>{1, 0, 0});
}
