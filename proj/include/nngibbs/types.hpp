#ifndef NNGIBBS_TYPES_HPP
#define NNGIBBS_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nngibbs {

using PointId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  PointId id = 0;
};

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Axis-aligned rectangle, closed on all sides.
struct Window {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  bool contains(const Point2& p) const { return contains(p.x, p.y); }
  bool contains(const Window& inner) const {
    return inner.xmin >= xmin && inner.xmax <= xmax && inner.ymin >= ymin && inner.ymax <= ymax;
  }
  Window eroded(double margin) const { return {xmin + margin, xmax - margin, ymin + margin, ymax - margin}; }
  Window dilated(double margin) const { return eroded(-margin); }
  Window translated(double tx, double ty) const { return {xmin + tx, xmax + tx, ymin + ty, ymax + ty}; }
  bool operator==(const Window&) const = default;
};

// Throws ParameterError unless xmin < xmax and ymin < ymax with finite bounds.
void validate_window(const Window& w);

struct Configuration {
  std::vector<Point2> points;
  Window window;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Builds a configuration with ids 0..n-1 from coordinate pairs.
Configuration make_configuration(const std::vector<std::pair<double, double>>& xy, const Window& window);

// Throws unless every point is finite, inside the window, with unique ids and pairwise distinct coordinates.
void validate_configuration(const Configuration& config);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class DuplicatePointError : public DegenerateInputError {
 public:
  using DegenerateInputError::DegenerateInputError;
};

class MissingPointError : public Error {
 public:
  using Error::Error;
};

class InadmissibleConfigurationError : public Error {
 public:
  using Error::Error;
};

class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public IdentifiabilityError {
 public:
  RankDeficiencyError(const std::string& what, int coordinate)
      : IdentifiabilityError(what), coordinate_(coordinate) {}
  // Zero-based parameter coordinate responsible for the deficiency, or -1 when unattributed.
  int coordinate() const { return coordinate_; }

 private:
  int coordinate_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace nngibbs

#endif  // NNGIBBS_TYPES_HPP
