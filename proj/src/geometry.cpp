#include "capkit/geometry.hpp"

#include <charconv>

namespace capkit {

namespace {

void require_same_dim(const Point& u, const Point& v, const char* op) {
  if (u.dim() != v.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" +
                         std::to_string(u.dim()) + " vs " +
                         std::to_string(v.dim()) + ")");
  }
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) {
    throw ValidationError("Point: need at least one coordinate");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      throw ValidationError("Point: coordinates must be finite");
    }
  }
}

Point Point::zeros(std::size_t dim) {
  return Point(std::vector<double>(dim, 0.0));
}

Point add(const Point& u, const Point& v) {
  require_same_dim(u, v, "add");
  std::vector<double> out(u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) out[i] = u[i] + v[i];
  return Point(std::move(out));
}

Point sub(const Point& u, const Point& v) {
  require_same_dim(u, v, "sub");
  std::vector<double> out(u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) out[i] = u[i] - v[i];
  return Point(std::move(out));
}

Point scaled(double c, const Point& u) {
  std::vector<double> out(u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) out[i] = c * u[i];
  return Point(std::move(out));
}

double inner(const Point& u, const Point& v) {
  require_same_dim(u, v, "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) acc += u[i] * v[i];
  return acc;
}

double norm_sq(const Point& u) { return inner(u, u); }

double norm(const Point& u) { return std::sqrt(norm_sq(u)); }

double dist(const Point& u, const Point& v) { return norm(sub(u, v)); }

double polarization_gap(const Point& u, const Point& v, const Point& p,
                        const Point& w) {
  require_same_dim(u, v, "polarization_gap");
  require_same_dim(u, p, "polarization_gap");
  require_same_dim(u, w, "polarization_gap");
  const double lhs = 2.0 * inner(sub(u, v), sub(p, w));
  const double rhs = norm_sq(sub(u, w)) + norm_sq(sub(v, p)) -
                     norm_sq(sub(u, p)) - norm_sq(sub(v, w));
  return lhs - rhs;
}

Point mann_combination(const Point& x, const Point& tx, double alpha) {
  require_same_dim(x, tx, "mann_combination");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("mann_combination: alpha must lie in (0,1), got " +
                          format_double(alpha));
  }
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = (1.0 - alpha) * x[i] + alpha * tx[i];
  }
  return Point(std::move(out));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_string(const Point& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) out += ", ";
    out += format_double(p[i]);
  }
  out += ")";
  return out;
}

}  // namespace capkit
