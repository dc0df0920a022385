#include "nngibbs/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "nngibbs/triangulation.hpp"

namespace nngibbs {
namespace {

namespace fs = std::filesystem;

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ValidationError("malformed " + what + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string temp_name(const fs::path& dir, const fs::path& target) {
  static thread_local std::mt19937_64 gen(std::random_device{}());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return (dir / ("." + target.filename().string() + "." + buf + ".tmp")).string();
}

void write_raw(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string PatternFile::get(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return "";
}

void PatternFile::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_pattern(const PatternFile& file) {
  const Window& w = file.config.window;
  std::string out = "# window " + format_double(w.xmin) + " " + format_double(w.xmax) + " " + format_double(w.ymin) +
                    " " + format_double(w.ymax) + "\n";
  for (const auto& [k, v] : file.metadata) {
    if (k.empty() || k == "window" || k.find_first_of(" \t\n") != std::string::npos) {
      throw ValidationError("invalid metadata key '" + k + "'");
    }
    if (v.find('\n') != std::string::npos) throw ValidationError("metadata value for '" + k + "' contains a newline");
    out += "# " + k + (v.empty() ? "" : " " + v) + "\n";
  }
  for (const auto& p : file.config.points) out += format_double(p.x) + "," + format_double(p.y) + "\n";
  return out;
}

PatternFile parse_pattern(const std::string& text) {
  PatternFile file;
  bool have_window = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const auto sp = body.find(' ');
      const std::string key = body.substr(0, sp);
      const std::string value = sp == std::string::npos ? "" : body.substr(sp + 1);
      if (key == "window") {
        const auto t = split_ws(value);
        if (t.size() != 4) throw ValidationError("window header needs four numbers");
        file.config.window = {parse_double(t[0], "window"), parse_double(t[1], "window"), parse_double(t[2], "window"),
                              parse_double(t[3], "window")};
        try {
          validate_window(file.config.window);
        } catch (const ParameterError& e) {
          throw ValidationError(e.what());
        }
        have_window = true;
      } else if (!key.empty()) {
        file.metadata.emplace_back(key, value);
      }
      continue;
    }
    if (!have_window) throw ValidationError("point record before the window header");
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("line " + std::to_string(lineno) + ": expected x,y");
    Point2 p{parse_double(line.substr(0, comma), "x coordinate"), parse_double(line.substr(comma + 1), "y coordinate"),
             static_cast<PointId>(file.config.points.size())};
    if (!file.config.window.contains(p)) {
      throw ValidationError("line " + std::to_string(lineno) + ": point outside the declared window");
    }
    file.config.points.push_back(p);
  }
  if (!have_window) throw ValidationError("missing window header");
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

PatternFile read_pattern(const std::string& path) { return parse_pattern(read_file(path)); }

void write_pattern(const std::string& path, const PatternFile& file) { atomic_write(path, format_pattern(file)); }

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target = fs::absolute(fs::path(path));
  const fs::path here = target.parent_path();
  if (!fs::is_directory(here)) throw IoError("directory of '" + path + "' does not exist");
  const char* env = std::getenv("NNGIBBS_TMPDIR");
  const fs::path dir = env && *env ? fs::path(env) : here;
  std::string tmp = temp_name(dir, target);
  write_raw(tmp, content);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec == std::errc::cross_device_link) {
    fs::remove(tmp);
    tmp = temp_name(here, target);
    write_raw(tmp, content);
    fs::rename(tmp, target, ec);
  }
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into '" + path + "': " + ec.message());
  }
}

std::string render_svg(const Configuration& config, const SvgOptions& opts) {
  const Window& w = config.window;
  validate_window(w);
  if (!(opts.width > 0.0)) throw ParameterError("svg width must be positive");
  const int panels = opts.two_panel ? 2 : 1;
  const double margin = 10.0;
  const double scale = opts.width / w.width();
  const double ph = w.height() * scale;
  const double total_w = panels * (opts.width + margin) + margin;
  const double total_h = ph + 2 * margin;
  const double r = opts.point_radius > 0.0 ? opts.point_radius : std::max(0.5, opts.width / 300.0);

  std::vector<Edge> edges;
  if (opts.edges || opts.two_panel) edges = beta_edges(build_delaunay(config), opts.beta0);

  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w << "\" height=\"" << total_h
      << "\" viewBox=\"0 0 " << total_w << " " << total_h << "\">\n";
  std::unordered_map<PointId, const Point2*> by_id;
  for (const auto& p : config.points) by_id[p.id] = &p;
  for (int k = 0; k < panels; ++k) {
    const double ox = margin + k * (opts.width + margin);
    auto sx = [&](double x) { return ox + (x - w.xmin) * scale; };
    auto sy = [&](double y) { return margin + (w.ymax - y) * scale; };
    const bool draw_edges = opts.two_panel ? k == 1 : opts.edges;
    out << "<g>\n<rect x=\"" << ox << "\" y=\"" << margin << "\" width=\"" << opts.width << "\" height=\"" << ph
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    if (draw_edges) {
      for (const auto& e : edges) {
        const Point2& a = *by_id.at(e.a);
        const Point2& b = *by_id.at(e.b);
        out << "<line x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(b.x) << "\" y2=\"" << sy(b.y)
            << "\" stroke=\"gray\" stroke-width=\"0.5\"/>\n";
      }
    }
    for (const auto& p : config.points) {
      out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"" << r << "\" fill=\"black\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace nngibbs
