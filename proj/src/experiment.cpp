#include "nngibbs/experiment.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "nngibbs/io.hpp"
#include "nngibbs/parallel.hpp"

namespace nngibbs {
namespace {

using nlohmann::json;

Window window_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("windows are arrays [xmin, xmax, ymin, ymax]");
  Window w{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  return w;
}

json window_to(const Window& w) { return json::array({w.xmin, w.xmax, w.ymin, w.ymax}); }

json vector_to(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : "nan"; }

}  // namespace

InteractionModel ModelSpec::build() const {
  switch (graph) {
    case GraphKind::None:
      return InteractionModel::none(hard_core);
    case GraphKind::BetaDelaunay:
      return InteractionModel::beta_delaunay(beta0, BinBounds(d), hard_core);
    case GraphKind::Complete:
      return InteractionModel::complete(BinBounds(d), hard_core);
  }
  throw ParameterError("unknown graph kind");
}

void ExperimentSpec::validate() const {
  const InteractionModel m = model.build();
  check_theta(theta, m);
  validate_window(sim_window);
  if (estimation_windows.empty()) throw ParameterError("at least one estimation window is required");
  for (const auto& w : estimation_windows) {
    validate_window(w);
    if (!sim_window.contains(w)) throw ParameterError("estimation windows must lie inside the simulation window");
  }
  if (replications < 1) throw ParameterError("replications must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("level must lie in (0, 1)");
  if (grid_step < 0.0 || cell_size < 0.0 || dependence_range < 0.0) {
    throw ParameterError("grid_step, cell_size and dependence_range must be nonnegative");
  }
  SamplerConfig s = sampler;
  s.sim_window = sim_window;
  s.validate();
}

ExperimentSpec parse_experiment(const std::string& json_text) {
  ExperimentSpec spec;
  try {
    const json j = json::parse(json_text);
    const json& m = j.at("model");
    spec.model.graph = parse_graph_kind(m.value("graph", std::string("beta-delaunay")));
    spec.model.beta0 = m.value("beta0", 0.1);
    if (m.contains("d")) spec.model.d = m.at("d").get<std::vector<double>>();
    if (m.contains("hard_core") && !m.at("hard_core").is_null()) spec.model.hard_core = m.at("hard_core").get<double>();
    const auto theta = j.at("theta").get<std::vector<double>>();
    spec.theta = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    if (j.contains("sim_window")) spec.sim_window = window_from(j.at("sim_window"));
    for (const auto& w : j.at("estimation_windows")) spec.estimation_windows.push_back(window_from(w));
    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      spec.sampler.n_steps = s.value("steps", spec.sampler.n_steps);
      spec.sampler.p_birth = s.value("p_birth", spec.sampler.p_birth);
      spec.sampler.p_death = s.value("p_death", spec.sampler.p_death);
      spec.sampler.p_move = s.value("p_move", spec.sampler.p_move);
      spec.sampler.move_stddev = s.value("move_stddev", spec.sampler.move_stddev);
      spec.sampler.energy_recompute_period = s.value("energy_recompute_period", spec.sampler.energy_recompute_period);
    }
    spec.grid_step = j.value("grid_step", 0.0);
    spec.cell_size = j.value("cell_size", 0.0);
    spec.dependence_range = j.value("dependence_range", 0.0);
    spec.level = j.value("level", 0.95);
    spec.replications = j.value("replications", 1);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.threads = j.value("threads", 0);
    if (j.contains("output")) {
      spec.records_path = j.at("output").value("records", std::string());
      spec.summary_path = j.at("output").value("summary", std::string());
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string experiment_to_json(const ExperimentSpec& spec) {
  json m{{"graph", graph_name(spec.model.graph)}, {"beta0", spec.model.beta0}, {"d", spec.model.d}};
  m["hard_core"] = spec.model.hard_core ? json(*spec.model.hard_core) : json(nullptr);
  json windows = json::array();
  for (const auto& w : spec.estimation_windows) windows.push_back(window_to(w));
  const SamplerConfig& s = spec.sampler;
  json j{{"model", m},
         {"theta", vector_to(spec.theta)},
         {"sim_window", window_to(spec.sim_window)},
         {"estimation_windows", windows},
         {"sampler",
          {{"steps", s.n_steps},
           {"p_birth", s.p_birth},
           {"p_death", s.p_death},
           {"p_move", s.p_move},
           {"move_stddev", s.move_stddev},
           {"energy_recompute_period", s.energy_recompute_period}}},
         {"grid_step", spec.grid_step},
         {"cell_size", spec.cell_size},
         {"dependence_range", spec.dependence_range},
         {"level", spec.level},
         {"replications", spec.replications},
         {"seed", spec.seed},
         {"threads", spec.threads},
         {"output", {{"records", spec.records_path}, {"summary", spec.summary_path}}}};
  return j.dump(2);
}

Configuration simulate_replication(const ExperimentSpec& spec, int r) {
  SamplerConfig cfg = spec.sampler;
  cfg.sim_window = spec.sim_window;
  cfg.seed = stream_seed(spec.seed, static_cast<std::uint64_t>(r));
  return run(spec.theta, spec.model.build(), cfg);
}

ReplicationRecord fit_replication(const ExperimentSpec& spec, const Configuration& phi, int r, int k) {
  ReplicationRecord rec;
  rec.replication = r;
  rec.window = k;
  const Window& est = spec.estimation_windows.at(static_cast<std::size_t>(k));
  try {
    const InteractionModel model = spec.model.build();
    const Window& f = spec.sim_window;
    const double border = std::min({est.xmin - f.xmin, f.xmax - est.xmax, est.ymin - f.ymin, f.ymax - est.ymax});
    AnalysisOptions opts;
    opts.fit.grid_step = spec.grid_step;
    opts.cell_size = spec.cell_size;
    opts.dependence_range = spec.dependence_range;
    opts.level = spec.level;
    const Analysis a = analyze(phi, model, ObservationScheme{f, est, border}, opts);
    for (const auto& p : phi.points) rec.points += a.scheme.estimation_window.contains(p);
    rec.iterations = a.fit.iterations;
    rec.theta = a.fit.theta;
    rec.converged = a.fit.converged;
    if (a.fit.converged) {
      rec.std_errors = a.std_errors;
      rec.ok = true;
    } else {
      rec.error = a.fit.message.empty() ? "fit did not converge" : a.fit.message;
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<ReplicationRecord>& records) {
  const Eigen::Index dim = spec.theta.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SummaryRow> rows;
  for (std::size_t k = 0; k < spec.estimation_windows.size(); ++k) {
    SummaryRow row;
    row.window = spec.estimation_windows[k];
    row.mean = Vector::Zero(dim);
    row.sd = Vector::Constant(dim, nan);
    row.mean_std_error = Vector::Zero(dim);
    std::vector<const ReplicationRecord*> good;
    for (const auto& rec : records) {
      if (rec.window != static_cast<int>(k)) continue;
      if (rec.ok) {
        good.push_back(&rec);
      } else {
        ++row.failures;
      }
    }
    row.successes = static_cast<int>(good.size());
    if (good.empty()) {
      row.mean.setConstant(nan);
      row.mean_std_error.setConstant(nan);
    } else {
      for (const auto* g : good) {
        row.mean += g->theta;
        row.mean_std_error += g->std_errors;
      }
      row.mean /= static_cast<double>(good.size());
      row.mean_std_error /= static_cast<double>(good.size());
      if (good.size() >= 2) {
        Vector ss = Vector::Zero(dim);
        for (const auto* g : good) ss += (g->theta - row.mean).cwiseAbs2();
        row.sd = (ss / static_cast<double>(good.size() - 1)).cwiseSqrt();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t nw = spec.estimation_windows.size();
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(spec.replications) * nw);
  parallel_for(static_cast<std::size_t>(spec.replications), resolve_threads(spec.threads), [&](std::size_t r) {
    Configuration phi;
    std::string failure;
    try {
      phi = simulate_replication(spec, static_cast<int>(r));
    } catch (const std::exception& e) {
      failure = std::string("simulation failed: ") + e.what();
    }
    for (std::size_t k = 0; k < nw; ++k) {
      ReplicationRecord& rec = records[r * nw + k];
      if (failure.empty()) {
        rec = fit_replication(spec, phi, static_cast<int>(r), static_cast<int>(k));
      } else {
        rec.replication = static_cast<int>(r);
        rec.window = static_cast<int>(k);
        rec.error = failure;
      }
    }
  });
  ExperimentResult out;
  out.summary = summarize(spec, records);
  out.records = std::move(records);
  return out;
}

std::string format_records_csv(const ExperimentSpec& spec, const std::vector<ReplicationRecord>& records) {
  const Eigen::Index dim = spec.theta.size();
  std::string out = "replication,window,ok,converged,points,iterations";
  for (Eigen::Index j = 0; j < dim; ++j) out += ",theta" + std::to_string(j + 1);
  for (Eigen::Index j = 0; j < dim; ++j) out += ",se" + std::to_string(j + 1);
  out += ",error\n";
  for (const auto& r : records) {
    out += std::to_string(r.replication) + "," + std::to_string(r.window) + "," + (r.ok ? "1" : "0") + "," +
           (r.converged ? "1" : "0") + "," + std::to_string(r.points) + "," + std::to_string(r.iterations);
    for (Eigen::Index j = 0; j < dim; ++j) out += "," + (j < r.theta.size() ? csv_number(r.theta[j]) : "nan");
    for (Eigen::Index j = 0; j < dim; ++j) out += "," + (j < r.std_errors.size() ? csv_number(r.std_errors[j]) : "nan");
    std::string err = r.error;
    for (char& c : err)
      if (c == '"' || c == '\n' || c == ',') c = ' ';
    out += ",\"" + err + "\"\n";
  }
  return out;
}

std::string format_summary_csv(const ExperimentSpec& spec, const std::vector<SummaryRow>& rows) {
  const Eigen::Index dim = spec.theta.size();
  std::string out = "xmin,xmax,ymin,ymax,successes,failures";
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::string t = std::to_string(j + 1);
    out += ",mean_theta" + t + ",sd_theta" + t + ",mean_se" + t;
  }
  out += "\n";
  for (const auto& r : rows) {
    out += csv_number(r.window.xmin) + "," + csv_number(r.window.xmax) + "," + csv_number(r.window.ymin) + "," +
           csv_number(r.window.ymax) + "," + std::to_string(r.successes) + "," + std::to_string(r.failures);
    for (Eigen::Index j = 0; j < dim; ++j) {
      out += "," + csv_number(r.mean[j]) + "," + csv_number(r.sd[j]) + "," + csv_number(r.mean_std_error[j]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace nngibbs
