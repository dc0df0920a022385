#ifndef NNGIBBS_SAMPLER_HPP
#define NNGIBBS_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "nngibbs/model.hpp"
#include "nngibbs/rng.hpp"

namespace nngibbs {

struct SamplerConfig {
  Window sim_window;
  std::uint64_t n_steps = 0;
  double p_birth = 0.35;
  double p_death = 0.35;
  double p_move = 0.30;
  double move_stddev = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t energy_recompute_period = 10000;
  // Compare the incremental triangulation against a rebuild at every recompute.
  bool verify_geometry = false;

  // Throws ParameterError on invalid probabilities, window or step settings.
  void validate() const;
};

enum class Proposal { Birth, Death, Move };

struct StepResult {
  Proposal kind = Proposal::Birth;
  bool accepted = false;
};

struct ChainCounters {
  std::uint64_t proposed[3] = {0, 0, 0};
  std::uint64_t accepted[3] = {0, 0, 0};
  std::uint64_t recomputes = 0;
  // Largest |cached - recomputed| / max(1, |recomputed|) seen at a recompute.
  double max_energy_drift = 0.0;
};

class ChainState {
 public:
  ChainState(const InteractionModel& model, const Window& sim_window, const Vector& theta);
  // Starts from a given admissible configuration inside the window.
  ChainState(const InteractionModel& model, const Configuration& initial, const Vector& theta);

  const PatternState& pattern() const { return pattern_; }
  PatternState& pattern() { return pattern_; }
  Configuration configuration() const { return pattern_.configuration(); }
  const Vector& theta() const { return theta_; }
  double cached_energy() const { return cached_energy_; }
  std::uint64_t step_count() const { return step_count_; }
  const ChainCounters& counters() const { return counters_; }

 private:
  friend StepResult step(ChainState&, const SamplerConfig&, Rng&);
  void recompute(const SamplerConfig& cfg);

  PatternState pattern_;
  Vector theta_;
  double cached_energy_ = 0.0;
  std::uint64_t step_count_ = 0;
  PointId next_id_ = 0;
  ChainCounters counters_;
};

// Logarithms of the Metropolis-Hastings ratios for the unit-rate Poisson
// reference on a window of the given area. `dv` is the local energy of the
// point being added (birth) or removed (death, computed on phi \ y), and n is
// the current point count.
double log_birth_ratio(double area, std::size_t n, double dv, double p_birth, double p_death);
double log_death_ratio(double area, std::size_t n, double dv, double p_birth, double p_death);
double log_move_ratio(double dv_new, double dv_old);

// One proposal. Rejected proposals leave the state unchanged.
StepResult step(ChainState& state, const SamplerConfig& cfg, Rng& rng);
void run_chain(ChainState& state, const SamplerConfig& cfg, Rng& rng, std::uint64_t n_steps);
// Runs cfg.n_steps proposals from the empty configuration with the generator seeded by cfg.seed.
Configuration run(const Vector& theta, const InteractionModel& model, const SamplerConfig& cfg);

// Homogeneous Poisson pattern by direct simulation, ids 0..n-1.
Configuration simulate_poisson(const Window& window, double intensity, Rng& rng);

// Test functional h(x, phi) given through the local statistics u(x|phi).
using TestFunction = std::function<double(const Point2& x, const Stats& u)>;

struct GnzOptions {
  // Side of the stratification cells; one uniform node is drawn per cell.
  double quadrature_step = 5.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct GnzResult {
  double statistic = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::vector<double> per_sample;
  double t() const { return std_error > 0.0 ? statistic / std_error : 0.0; }
};

// Mean over samples of sum_{x in phi_obs} h(x, phi \ x) - int_obs h(x, phi) exp(-theta' u(x|phi)) dx,
// with its standard error. The integral uses stratified uniform quadrature.
// With one sample the standard error is infinite.
std::vector<GnzResult> gnz_residuals(const std::vector<Configuration>& samples, const std::vector<TestFunction>& hs,
                                     const Vector& theta, const InteractionModel& model, const Window& obs_window,
                                     const GnzOptions& opts = {});
GnzResult gnz_residual(const std::vector<Configuration>& samples, const TestFunction& h, const Vector& theta,
                       const InteractionModel& model, const Window& obs_window, const GnzOptions& opts = {});

}  // namespace nngibbs

#endif  // NNGIBBS_SAMPLER_HPP
