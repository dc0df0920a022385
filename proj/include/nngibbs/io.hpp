#ifndef NNGIBBS_IO_HPP
#define NNGIBBS_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "nngibbs/model.hpp"
#include "nngibbs/types.hpp"

namespace nngibbs {

// Plain-text point pattern: `# window xmin xmax ymin ymax`, optional
// `# key value` metadata lines in order, then one `x,y` record per point.
struct PatternFile {
  Configuration config;
  std::vector<std::pair<std::string, std::string>> metadata;

  // Value of the first metadata entry with this key, or "" when absent.
  std::string get(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
};

// Shortest-exact decimal form with 17 significant digits.
std::string format_double(double v);
// Shortest decimal form that parses back to the same double.
std::string format_shortest(double v);

std::string format_pattern(const PatternFile& file);
// Throws ValidationError on malformed content or a point outside the window.
PatternFile parse_pattern(const std::string& text);

// Throws IoError when the file cannot be read.
PatternFile read_pattern(const std::string& path);
std::string read_file(const std::string& path);
void write_pattern(const std::string& path, const PatternFile& file);

// Writes to a temporary file and renames it over `path`. The temporary lives
// in $NNGIBBS_TMPDIR when set, otherwise beside the target.
void atomic_write(const std::string& path, const std::string& content);

struct SvgOptions {
  double width = 600.0;
  double point_radius = 0.0;  // 0 picks a radius from the window size
  bool edges = false;
  bool two_panel = false;  // left panel points only, right panel with edges
  double beta0 = 0.1;
};

std::string render_svg(const Configuration& config, const SvgOptions& opts);

}  // namespace nngibbs

#endif  // NNGIBBS_IO_HPP
