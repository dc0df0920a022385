#ifndef NNGIBBS_EXPERIMENT_HPP
#define NNGIBBS_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nngibbs/asymptotics.hpp"
#include "nngibbs/sampler.hpp"

namespace nngibbs {

struct ModelSpec {
  GraphKind graph = GraphKind::BetaDelaunay;
  double beta0 = 0.1;
  std::vector<double> d;  // bin bounds; ignored for GraphKind::None
  std::optional<double> hard_core;

  InteractionModel build() const;
};

struct ExperimentSpec {
  ModelSpec model;
  Vector theta;
  Window sim_window{-350, 350, -350, 350};
  std::vector<Window> estimation_windows;
  SamplerConfig sampler;  // sim_window and seed are overridden per replication
  double grid_step = 0.0;
  double cell_size = 0.0;
  double dependence_range = 0.0;
  double level = 0.95;
  int replications = 1;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string records_path;
  std::string summary_path;

  // Throws ParameterError when the spec is inconsistent.
  void validate() const;
};

// JSON document form. Parsing throws ValidationError for malformed documents.
ExperimentSpec parse_experiment(const std::string& json_text);
std::string experiment_to_json(const ExperimentSpec& spec);

struct ReplicationRecord {
  int replication = 0;
  int window = 0;
  bool ok = false;
  bool converged = false;
  std::string error;
  std::size_t points = 0;
  int iterations = 0;
  Vector theta;
  Vector std_errors;
};

struct SummaryRow {
  Window window;
  int successes = 0;
  int failures = 0;
  Vector mean;
  Vector sd;  // NaN when fewer than two successes
  Vector mean_std_error;
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;
  std::vector<SummaryRow> summary;
};

// Simulated pattern of replication r, seeded by stream r of the master seed.
Configuration simulate_replication(const ExperimentSpec& spec, int r);
// Fit and covariance of one pattern on estimation window k. Errors are
// captured in the record.
ReplicationRecord fit_replication(const ExperimentSpec& spec, const Configuration& phi, int r, int k);
std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<ReplicationRecord>& records);
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string format_records_csv(const ExperimentSpec& spec, const std::vector<ReplicationRecord>& records);
std::string format_summary_csv(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows);

}  // namespace nngibbs

#endif  // NNGIBBS_EXPERIMENT_HPP
