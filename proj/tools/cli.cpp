#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nngibbs/asymptotics.hpp"
#include "nngibbs/experiment.hpp"
#include "nngibbs/io.hpp"
#include "nngibbs/sampler.hpp"

namespace nngibbs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class StrictFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ParameterError("malformed number '" + item + "' in " + what);
    }
  }
  if (out.empty()) throw ParameterError(what + " is empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_shortest(v[i]);
  return out;
}

std::string join(const Vector& v) { return join(std::vector<double>(v.data(), v.data() + v.size())); }

Window parse_window(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 4) throw ParameterError(what + " needs xmin,xmax,ymin,ymax");
  Window w{v[0], v[1], v[2], v[3]};
  validate_window(w);
  return w;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json window_json(const Window& w) { return json::array({w.xmin, w.xmax, w.ymin, w.ymax}); }

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void write_json(const std::string& path, const json& doc) { atomic_write(path, doc.dump(2) + "\n"); }

// Model flags shared by several commands. Unset flags fall back to pattern
// metadata, then to built-in defaults.
struct ModelFlags {
  std::string graph = "beta-delaunay";
  double beta0 = 0.1;
  std::string d = "0,20,80";
  double hard_core = 0.0;
  CLI::Option* graph_opt = nullptr;
  CLI::Option* beta0_opt = nullptr;
  CLI::Option* d_opt = nullptr;
  CLI::Option* hard_core_opt = nullptr;

  void add(CLI::App* app) {
    graph_opt = app->add_option("--graph", graph, "interaction graph: none, beta-delaunay or complete");
    beta0_opt = app->add_option("--beta0", beta0, "angle threshold in radians");
    d_opt = app->add_option("--d", d, "bin bounds d0,d1,...,d_{p+1} with d0 = 0");
    hard_core_opt = app->add_option("--hard-core", hard_core, "hard-core distance (0 disables)");
  }

  void inherit(const PatternFile& file) {
    if (!graph_opt->count() && !file.get("graph").empty()) graph = file.get("graph");
    if (!beta0_opt->count() && !file.get("beta0").empty()) beta0 = parse_list(file.get("beta0"), "beta0").at(0);
    if (!d_opt->count() && !file.get("d").empty()) d = file.get("d");
    if (!hard_core_opt->count() && !file.get("hard_core").empty()) {
      hard_core = parse_list(file.get("hard_core"), "hard_core").at(0);
    }
  }

  ModelSpec spec() const {
    ModelSpec s;
    s.graph = parse_graph_kind(graph);
    s.beta0 = beta0;
    if (s.graph != GraphKind::None) s.d = parse_list(d, "--d");
    if (hard_core < 0.0) throw ParameterError("hard-core distance must be nonnegative");
    if (hard_core > 0.0) s.hard_core = hard_core;
    return s;
  }

  json to_json(const ModelSpec& s) const {
    json j{{"graph", graph_name(s.graph)}};
    if (s.graph == GraphKind::BetaDelaunay) j["beta0"] = s.beta0;
    j["d"] = s.d;
    j["hard_core"] = s.hard_core ? json(*s.hard_core) : json(nullptr);
    return j;
  }

  void to_metadata(const ModelSpec& s, PatternFile& file) const {
    file.set("graph", graph_name(s.graph));
    if (s.graph == GraphKind::BetaDelaunay) file.set("beta0", format_shortest(s.beta0));
    if (!s.d.empty()) file.set("d", join(s.d));
    if (s.hard_core) file.set("hard_core", format_shortest(*s.hard_core));
  }
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  int threads = 1;
  bool strict = false;

  void add(CLI::App* app, bool out_required) {
    app->add_option("--seed", seed, "master random seed");
    auto* o = app->add_option("-o,--out", out, "output path");
    if (out_required) o->required();
    app->add_option("--config", config, "JSON file of option values");
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
    app->add_flag("--strict", strict, "nonzero exit on non-convergence or flagged diagnostics");
  }
};

bool has_flag(const std::vector<std::string>& args, const std::string& name) {
  for (const auto& a : args)
    if (a == name || a.rfind(name + "=", 0) == 0) return true;
  return false;
}

// Appends `--key value` for every entry of a JSON config file whose flag is
// not already on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty() || args[0] == "replicate") return args;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");
  std::vector<std::string> out = args;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
      }
    } else {
      text = value.dump();
    }
    out.push_back(flag + "=" + text);
  }
  return out;
}

struct SimulateCmd {
  ModelFlags model;
  Common common;
  std::string theta = "0,2,4";
  std::string window = "-600,600,-600,600";
  SamplerConfig cfg;

  void add(CLI::App* app) {
    model.add(app);
    common.add(app, true);
    app->add_option("--theta", theta, "parameters theta1,...,theta_{p+1}");
    app->add_option("--window", window, "simulation window xmin,xmax,ymin,ymax");
    app->add_option("--steps", cfg.n_steps, "number of proposals");
    app->add_option("--p-birth", cfg.p_birth);
    app->add_option("--p-death", cfg.p_death);
    app->add_option("--p-move", cfg.p_move);
    app->add_option("--move-stddev", cfg.move_stddev, "Gaussian move scale");
    app->add_option("--recompute-period", cfg.energy_recompute_period, "steps between full energy refreshes");
  }

  int exec(std::ostream& out) {
    const ModelSpec ms = model.spec();
    const InteractionModel m = ms.build();
    cfg.sim_window = parse_window(window, "--window");
    cfg.seed = common.seed;
    const Vector th = to_vector(parse_list(theta, "--theta"));
    const Configuration phi = run(th, m, cfg);
    PatternFile file;
    file.config = phi;
    model.to_metadata(ms, file);
    file.set("theta", join(th));
    file.set("steps", std::to_string(cfg.n_steps));
    file.set("seed", std::to_string(cfg.seed));
    file.set("p_birth", format_shortest(cfg.p_birth));
    file.set("p_death", format_shortest(cfg.p_death));
    file.set("p_move", format_shortest(cfg.p_move));
    file.set("move_stddev", format_shortest(cfg.move_stddev));
    file.set("recompute_period", std::to_string(cfg.energy_recompute_period));
    write_pattern(common.out, file);
    out << "wrote " << phi.size() << " points to " << common.out << "\n";
    return kOk;
  }
};

struct FitCmd {
  ModelFlags model;
  Common common;
  std::string pattern;
  std::string estimation_window;
  double border = -1.0;
  double grid_step = 0.0;
  double cell_size = 0.0;
  double dependence_range = 0.0;
  double level = 0.95;
  double lower = -20.0;
  double upper = 20.0;

  void add(CLI::App* app) {
    app->add_option("pattern", pattern, "pattern file")->required();
    model.add(app);
    common.add(app, true);
    app->add_option("--estimation-window", estimation_window, "estimation window xmin,xmax,ymin,ymax");
    app->add_option("--border", border, "border width (ignored with --estimation-window)");
    app->add_option("--grid-step", grid_step, "quadrature step (0 = automatic)");
    app->add_option("--cell-size", cell_size, "block size for the covariance (0 = interaction range)");
    app->add_option("--dependence-range", dependence_range, "dependence range (0 = interaction range)");
    app->add_option("--level", level, "confidence level");
    app->add_option("--lower", lower, "lower bound of the parameter box");
    app->add_option("--upper", upper, "upper bound of the parameter box");
  }

  int exec(std::ostream& out) {
    const PatternFile file = read_pattern(pattern);
    model.inherit(file);
    const ModelSpec ms = model.spec();
    const InteractionModel m = ms.build();
    const Window& full = file.config.window;

    ObservationScheme scheme;
    std::string border_rule;
    if (!estimation_window.empty()) {
      const Window est = parse_window(estimation_window, "--estimation-window");
      if (!full.contains(est)) throw ValidationError("estimation window is not inside the pattern window");
      const double b = std::min({est.xmin - full.xmin, full.xmax - est.xmax, est.ymin - full.ymin, full.ymax - est.ymax});
      scheme = {full, est, b};
      border_rule = "estimation-window";
    } else if (border >= 0.0) {
      scheme = make_scheme(full, border);
      border_rule = "explicit";
    } else {
      const double half = 0.5 * std::min(full.width(), full.height());
      const double cell = cell_size > 0.0 ? cell_size : m.range();
      const double need = cell > 0.0 ? 0.5 * cell : 0.0;
      if (m.locality_radius() + need < half) {
        scheme = make_scheme(full, m.locality_radius());
        border_rule = "locality-radius";
      } else if (m.range() + need < half) {
        scheme = make_scheme(full, m.range());
        border_rule = "interaction-range";
      } else {
        throw ValidationError("pattern window is too small for any default border; pass --border");
      }
    }

    AnalysisOptions opts;
    opts.fit.grid_step = grid_step;
    opts.fit.lower = lower;
    opts.fit.upper = upper;
    opts.cell_size = cell_size;
    opts.dependence_range = dependence_range;
    opts.level = level;
    const Analysis a = analyze(file.config, m, scheme, opts);

    json settings{{"pattern", pattern},
                  {"model", model.to_json(ms)},
                  {"full_window", window_json(full)},
                  {"estimation_window", window_json(a.scheme.estimation_window)},
                  {"border", a.scheme.border},
                  {"border_rule", border_rule},
                  {"grid_step", a.fit.grid_step},
                  {"cell_size", a.cell_size},
                  {"dependence_range", a.dependence_range},
                  {"level", level},
                  {"box", {lower, upper}},
                  {"tolerance", opts.fit.tolerance},
                  {"max_iterations", opts.fit.max_iterations},
                  {"max_halvings", opts.fit.max_halvings},
                  {"seed", common.seed},
                  {"threads", common.threads},
                  {"strict", common.strict}};
    json result{{"converged", a.fit.converged},
                {"left_box", a.fit.left_box},
                {"message", a.fit.message},
                {"theta", vector_json(a.fit.theta)},
                {"logpl", a.fit.logpl},
                {"grad_norm", a.fit.grad_norm},
                {"iterations", a.fit.iterations},
                {"hessian", matrix_json(a.fit.hessian)},
                {"data_points", a.fit.data_points},
                {"nodes", a.fit.nodes},
                {"area", a.fit.area},
                {"cells", a.cells}};
    if (a.fit.converged) {
      result["std_errors"] = vector_json(a.std_errors);
      json ci = json::array();
      for (const auto& iv : a.intervals) ci.push_back({iv.lower, iv.upper});
      result["intervals"] = ci;
      result["sigma_hat"] = matrix_json(a.sigma.value);
      result["covariance"] = matrix_json(a.covariance);
      result["neighbor_radius"] = a.sigma.neighbor_radius;
      result["small_window"] = a.sigma.small_window;
    } else {
      result["std_errors"] = nullptr;
      result["intervals"] = nullptr;
      result["sigma_hat"] = nullptr;
      result["covariance"] = nullptr;
    }
    write_json(common.out, json{{"command", "fit"}, {"settings", settings}, {"result", result}});
    out << (a.fit.converged ? "converged" : "did not converge") << ": theta = " << join(a.fit.theta) << "\n";
    if (!a.fit.converged && common.strict) throw StrictFailure("fit did not converge");
    return kOk;
  }
};

struct ReplicateCmd {
  Common common;
  std::string spec_path;
  std::string records;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("spec", spec_path, "experiment spec (JSON)");
    common.add(app, false);
    seed_opt = app->get_option("--seed");
    threads_opt = app->get_option("--threads");
    app->add_option("--records", records, "per-replication record file (CSV)");
  }

  int exec(std::ostream& out) {
    const std::string path = !spec_path.empty() ? spec_path : common.config;
    if (path.empty()) throw ParameterError("replicate needs an experiment spec (positional or --config)");
    ExperimentSpec spec = parse_experiment(read_file(path));
    if (seed_opt->count()) spec.seed = common.seed;
    if (threads_opt->count()) spec.threads = common.threads;
    if (!common.out.empty()) spec.summary_path = common.out;
    if (!records.empty()) spec.records_path = records;
    if (spec.summary_path.empty()) throw ParameterError("no summary path: pass -o or set output.summary");
    if (spec.records_path.empty()) spec.records_path = spec.summary_path + ".records.csv";
    spec.validate();

    const ExperimentResult res = run_experiment(spec);
    atomic_write(spec.records_path, format_records_csv(spec, res.records));
    atomic_write(spec.summary_path, format_summary_csv(spec, res.summary));

    json rows = json::array();
    for (const auto& r : res.summary) {
      rows.push_back({{"window", window_json(r.window)},
                      {"successes", r.successes},
                      {"failures", r.failures},
                      {"mean", vector_json(r.mean)},
                      {"sd", vector_json(r.sd)},
                      {"mean_std_error", vector_json(r.mean_std_error)}});
    }
    const json doc{{"command", "replicate"}, {"settings", json::parse(experiment_to_json(spec))}, {"summary", rows}};
    fs::path side(spec.summary_path);
    side.replace_extension(".json");
    write_json(side.string(), doc);

    int failures = 0;
    for (const auto& r : res.summary) failures += r.failures;
    out << "replications " << spec.replications << ", failed fits " << failures << ", summary in "
        << spec.summary_path << "\n";
    if (failures > 0 && common.strict) throw StrictFailure("some replications failed");
    return kOk;
  }
};

struct RenderCmd {
  Common common;
  std::string pattern;
  SvgOptions svg;
  CLI::Option* beta0_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("pattern", pattern, "pattern file")->required();
    common.add(app, true);
    app->add_flag("--edges", svg.edges, "draw beta-Delaunay edges");
    app->add_flag("--two-panel", svg.two_panel, "points alone beside points with edges");
    beta0_opt = app->add_option("--beta0", svg.beta0, "angle threshold for drawn edges");
    app->add_option("--width", svg.width, "panel width in pixels");
    app->add_option("--radius", svg.point_radius, "point radius in pixels (0 = automatic)");
  }

  int exec(std::ostream& out) {
    const PatternFile file = read_pattern(pattern);
    if (!beta0_opt->count() && !file.get("beta0").empty()) svg.beta0 = parse_list(file.get("beta0"), "beta0").at(0);
    atomic_write(common.out, render_svg(file.config, svg));
    out << "wrote " << common.out << "\n";
    return kOk;
  }
};

struct GnzCmd {
  ModelFlags model;
  Common common;
  std::string dir;
  std::string theta;
  std::string obs_window;
  double quadrature_step = 5.0;
  double threshold = 4.0;

  void add(CLI::App* app) {
    app->add_option("dir", dir, "directory of pattern files")->required();
    model.add(app);
    common.add(app, true);
    app->add_option("--theta", theta, "parameters to check (default: pattern metadata)");
    app->add_option("--obs-window", obs_window, "observation window (default: pattern window)");
    app->add_option("--quadrature-step", quadrature_step, "stratified quadrature cell size");
    app->add_option("--threshold", threshold, "flag when |t| exceeds this value");
  }

  int exec(std::ostream& out) {
    if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (e.is_regular_file() && !name.empty() && name[0] != '.') files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParameterError("no pattern files in '" + dir + "'");
    std::vector<Configuration> samples;
    PatternFile first;
    for (std::size_t i = 0; i < files.size(); ++i) {
      PatternFile f = read_pattern(files[i]);
      if (i == 0) first = f;
      samples.push_back(std::move(f.config));
    }
    model.inherit(first);
    const ModelSpec ms = model.spec();
    const InteractionModel m = ms.build();
    std::string theta_text = theta.empty() ? first.get("theta") : theta;
    if (theta_text.empty()) throw ParameterError("no --theta given and the patterns carry none");
    const Vector th = to_vector(parse_list(theta_text, "--theta"));
    const Window w = obs_window.empty() ? samples.front().window : parse_window(obs_window, "--obs-window");

    std::vector<TestFunction> hs;
    std::vector<std::string> names;
    hs.push_back([](const Point2&, const Stats&) { return 1.0; });
    names.push_back("1");
    for (int j = 1; j < m.dim(); ++j) {
      hs.push_back([j](const Point2&, const Stats& u) { return u[j]; });
      names.push_back("u" + std::to_string(j + 1));
    }
    GnzOptions opts;
    opts.quadrature_step = quadrature_step;
    opts.seed = common.seed;
    opts.threads = common.threads;
    const auto res = gnz_residuals(samples, hs, th, m, w, opts);

    json rows = json::array();
    bool flagged = false;
    for (std::size_t i = 0; i < res.size(); ++i) {
      const double t = res[i].t();
      const bool flag = std::isfinite(t) && std::abs(t) > threshold;
      flagged = flagged || flag;
      rows.push_back({{"h", names[i]},
                      {"statistic", res[i].statistic},
                      {"std_error", std::isfinite(res[i].std_error) ? json(res[i].std_error) : json(nullptr)},
                      {"t", std::isfinite(t) ? json(t) : json(nullptr)},
                      {"flagged", flag}});
      out << "h = " << names[i] << ": statistic " << res[i].statistic << ", t " << t << (flag ? "  FLAGGED" : "")
          << "\n";
    }
    json settings{{"dir", dir},
                  {"files", files.size()},
                  {"model", model.to_json(ms)},
                  {"theta", vector_json(th)},
                  {"obs_window", window_json(w)},
                  {"quadrature_step", quadrature_step},
                  {"threshold", threshold},
                  {"seed", common.seed},
                  {"threads", common.threads},
                  {"strict", common.strict}};
    write_json(common.out, json{{"command", "gnz-check"}, {"settings", settings}, {"residuals", rows}, {"flagged", flagged}});
    if (flagged && common.strict) throw StrictFailure("equilibrium residual flagged");
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nearest-neighbour Gibbs point processes: simulation, pseudo-likelihood fitting and diagnostics"};
  app.require_subcommand(1);
  SimulateCmd simulate;
  FitCmd fit;
  ReplicateCmd replicate;
  RenderCmd render;
  GnzCmd gnz;
  auto* s_sim = app.add_subcommand("simulate", "simulate a pattern by birth-death-move MCMC");
  auto* s_fit = app.add_subcommand("fit", "maximum pseudo-likelihood fit with sandwich covariance");
  auto* s_rep = app.add_subcommand("replicate", "run a replication experiment from a spec");
  auto* s_ren = app.add_subcommand("render", "render a pattern as SVG");
  auto* s_gnz = app.add_subcommand("gnz-check", "equilibrium residuals over a directory of patterns");
  simulate.add(s_sim);
  fit.add(s_fit);
  replicate.add(s_rep);
  render.add(s_ren);
  gnz.add(s_gnz);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      std::ostringstream o, eo;
      const int code = app.exit(e, o, eo);
      out << o.str();
      err << eo.str();
      return code == 0 ? kOk : kUsage;
    }
    if (s_sim->parsed()) return simulate.exec(out);
    if (s_fit->parsed()) return fit.exec(out);
    if (s_rep->parsed()) return replicate.exec(out);
    if (s_ren->parsed()) return render.exec(out);
    if (s_gnz->parsed()) return gnz.exec(out);
    return kUsage;
  } catch (const StrictFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const ParameterError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
}

}  // namespace nngibbs::cli
