#include "nngibbs/sampler.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "nngibbs/parallel.hpp"

namespace nngibbs {

void SamplerConfig::validate() const {
  validate_window(sim_window);
  for (double p : {p_birth, p_death, p_move}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("proposal probabilities must lie in [0, 1]");
  }
  if (std::abs(p_birth + p_death + p_move - 1.0) > 1e-12) throw ParameterError("proposal probabilities must sum to 1");
  if (p_move > 0.0 && !(move_stddev > 0.0 && std::isfinite(move_stddev))) {
    throw ParameterError("move standard deviation must be positive");
  }
  if (energy_recompute_period == 0) throw ParameterError("energy recompute period must be positive");
}

ChainState::ChainState(const InteractionModel& model, const Window& sim_window, const Vector& theta)
    : pattern_(model, sim_window), theta_(theta) {
  check_theta(theta, model);
}

ChainState::ChainState(const InteractionModel& model, const Configuration& initial, const Vector& theta)
    : pattern_(model, initial), theta_(theta) {
  check_theta(theta, model);
  validate_configuration(initial);
  if (!pattern_.admissible()) throw InadmissibleConfigurationError("initial configuration violates the hard core");
  cached_energy_ = theta_.dot(pattern_.suff_stats());
  next_id_ = pattern_.fresh_id();
}

void ChainState::recompute(const SamplerConfig& cfg) {
  const double exact = theta_.dot(pattern_.suff_stats());
  const double drift = std::abs(cached_energy_ - exact) / std::max(1.0, std::abs(exact));
  counters_.max_energy_drift = std::max(counters_.max_energy_drift, drift);
  cached_energy_ = exact;
  ++counters_.recomputes;
  if (cfg.verify_geometry && pattern_.triangulation()) {
    const Triangulation rebuilt = build_delaunay(pattern_.configuration());
    std::set<TriangleIds> a, b;
    for (auto t : pattern_.triangulation()->triangles()) {
      std::sort(t.begin(), t.end());
      a.insert(t);
    }
    for (auto t : rebuilt.triangles()) {
      std::sort(t.begin(), t.end());
      b.insert(t);
    }
    if (a != b) throw Error("incremental triangulation diverged from rebuild at step " + std::to_string(step_count_));
  }
}

double log_birth_ratio(double area, std::size_t n, double dv, double p_birth, double p_death) {
  return std::log(p_death) - std::log(p_birth) + std::log(area) - dv - std::log(static_cast<double>(n + 1));
}

double log_death_ratio(double area, std::size_t n, double dv, double p_birth, double p_death) {
  return std::log(p_birth) - std::log(p_death) + std::log(static_cast<double>(n)) + dv - std::log(area);
}

double log_move_ratio(double dv_new, double dv_old) { return -(dv_new - dv_old); }

namespace {

bool accept(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  return rng.uniform() < std::exp(log_ratio);
}

}  // namespace

StepResult step(ChainState& state, const SamplerConfig& cfg, Rng& rng) {
  PatternState& pat = state.pattern_;
  const Window& w = cfg.sim_window;
  const double area = w.area();
  const double r = rng.uniform();
  StepResult res;
  if (r < cfg.p_birth) {
    res.kind = Proposal::Birth;
    const Point2 x{rng.uniform(w.xmin, w.xmax), rng.uniform(w.ymin, w.ymax), state.next_id_};
    if (pat.admissible_insert(x)) {
      const double dv = state.theta_.dot(pat.local_stats(x));
      if (accept(log_birth_ratio(area, pat.size(), dv, cfg.p_birth, cfg.p_death), rng)) {
        pat.insert(x);
        ++state.next_id_;
        state.cached_energy_ += dv;
        res.accepted = true;
      }
    }
  } else if (r < cfg.p_birth + cfg.p_death) {
    res.kind = Proposal::Death;
    const std::size_t n = pat.size();
    if (n > 0) {
      const Point2 y = pat.points()[rng.below(n)];
      const double dv = state.theta_.dot(pat.removal_stats(y.id));
      if (accept(log_death_ratio(area, n, dv, cfg.p_birth, cfg.p_death), rng)) {
        pat.remove(y.id);
        state.cached_energy_ -= dv;
        res.accepted = true;
      }
    }
  } else {
    res.kind = Proposal::Move;
    const std::size_t n = pat.size();
    if (n > 0) {
      const Point2 y = pat.points()[rng.below(n)];
      const double dx = cfg.move_stddev * rng.normal();
      const double dy = cfg.move_stddev * rng.normal();
      const Point2 x{y.x + dx, y.y + dy, y.id};
      if (w.contains(x) && pat.admissible_insert(x, y.id) && !(x.x == y.x && x.y == y.y)) {
        const double dv_old = state.theta_.dot(pat.removal_stats(y.id));
        pat.remove(y.id);
        double dv_new = 0.0;
        bool ok = true;
        try {
          dv_new = state.theta_.dot(pat.local_stats(x));
        } catch (const DuplicatePointError&) {
          ok = false;
        }
        if (ok && accept(log_move_ratio(dv_new, dv_old), rng)) {
          pat.insert(x);
          state.cached_energy_ += dv_new - dv_old;
          res.accepted = true;
        } else {
          pat.insert(y);
        }
      }
    }
  }
  const int k = static_cast<int>(res.kind);
  ++state.counters_.proposed[k];
  if (res.accepted) ++state.counters_.accepted[k];
  ++state.step_count_;
  if (state.step_count_ % cfg.energy_recompute_period == 0) state.recompute(cfg);
  return res;
}

void run_chain(ChainState& state, const SamplerConfig& cfg, Rng& rng, std::uint64_t n_steps) {
  cfg.validate();
  if (!(state.pattern().extent() == cfg.sim_window)) throw ParameterError("chain window differs from sampler window");
  for (std::uint64_t i = 0; i < n_steps; ++i) step(state, cfg, rng);
}

Configuration run(const Vector& theta, const InteractionModel& model, const SamplerConfig& cfg) {
  cfg.validate();
  ChainState state(model, cfg.sim_window, theta);
  Rng rng(cfg.seed);
  run_chain(state, cfg, rng, cfg.n_steps);
  return state.configuration();
}

Configuration simulate_poisson(const Window& window, double intensity, Rng& rng) {
  validate_window(window);
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ParameterError("intensity must be nonnegative");
  Configuration c;
  c.window = window;
  const std::uint64_t n = rng.poisson(intensity * window.area());
  c.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = rng.uniform(window.xmin, window.xmax);
    const double y = rng.uniform(window.ymin, window.ymax);
    c.points.push_back({x, y, static_cast<PointId>(i)});
  }
  return c;
}

std::vector<GnzResult> gnz_residuals(const std::vector<Configuration>& samples, const std::vector<TestFunction>& hs,
                                     const Vector& theta, const InteractionModel& model, const Window& obs_window,
                                     const GnzOptions& opts) {
  if (samples.empty()) throw ParameterError("GNZ residual needs at least one sample");
  if (hs.empty()) throw ParameterError("GNZ residual needs at least one test function");
  if (!(opts.quadrature_step > 0.0)) throw ParameterError("quadrature step must be positive");
  validate_window(obs_window);
  check_theta(theta, model);
  const std::size_t m = samples.size(), nh = hs.size();
  std::vector<std::vector<double>> residual(nh, std::vector<double>(m, 0.0));
  const double s = opts.quadrature_step;
  const auto nx = static_cast<std::size_t>(std::ceil(obs_window.width() / s - 1e-9));
  const auto ny = static_cast<std::size_t>(std::ceil(obs_window.height() / s - 1e-9));

  parallel_for(m, opts.threads, [&](std::size_t k) {
    const Configuration& phi = samples[k];
    PatternState state(model, phi);
    std::vector<double> sum(nh, 0.0), integral(nh, 0.0);
    for (const auto& p : phi.points) {
      if (!obs_window.contains(p)) continue;
      const Stats u = state.removal_stats(p.id);
      for (std::size_t j = 0; j < nh; ++j) sum[j] += hs[j](p, u);
    }
    Rng rng(stream_seed(opts.seed, k));
    const PointId qid = state.fresh_id();
    for (std::size_t i = 0; i < nx; ++i) {
      const double x0 = obs_window.xmin + s * static_cast<double>(i);
      const double x1 = std::min(obs_window.xmax, x0 + s);
      for (std::size_t j = 0; j < ny; ++j) {
        const double y0 = obs_window.ymin + s * static_cast<double>(j);
        const double y1 = std::min(obs_window.ymax, y0 + s);
        const Point2 x{rng.uniform(x0, x1), rng.uniform(y0, y1), qid};
        if (!state.admissible_insert(x)) continue;
        const Stats u = state.local_stats(x);
        const double weight = (x1 - x0) * (y1 - y0) * std::exp(-theta.dot(u));
        for (std::size_t h = 0; h < nh; ++h) integral[h] += hs[h](x, u) * weight;
      }
    }
    for (std::size_t h = 0; h < nh; ++h) residual[h][k] = sum[h] - integral[h];
  });

  std::vector<GnzResult> out(nh);
  for (std::size_t h = 0; h < nh; ++h) {
    GnzResult& r = out[h];
    r.samples = m;
    r.per_sample = residual[h];
    double mean = 0.0;
    for (double v : residual[h]) mean += v;
    mean /= static_cast<double>(m);
    r.statistic = mean;
    if (m < 2) {
      r.std_error = std::numeric_limits<double>::infinity();
    } else {
      double ss = 0.0;
      for (double v : residual[h]) ss += (v - mean) * (v - mean);
      r.std_error = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    }
  }
  return out;
}

GnzResult gnz_residual(const std::vector<Configuration>& samples, const TestFunction& h, const Vector& theta,
                       const InteractionModel& model, const Window& obs_window, const GnzOptions& opts) {
  return gnz_residuals(samples, {h}, theta, model, obs_window, opts).front();
}

}  // namespace nngibbs
