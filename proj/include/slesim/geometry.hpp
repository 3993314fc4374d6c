#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sle {

using Cpx = std::complex<double>;

// Square root branch mapping C \ [0,inf) onto the closed upper half-plane.
// For real non-negative input the positive root is returned; callers that
// track points through the flow disambiguate that case themselves.
inline Cpx sqrt_up(double x, double y) {
  if (y == 0.0) {
    if (x >= 0.0) return {std::sqrt(x), 0.0};
    return {0.0, std::sqrt(-x)};
  }
  const double r = std::sqrt(x * x + y * y);
  double p, q;
  if (x >= 0.0) {
    p = std::sqrt(0.5 * (r + x));
    q = std::abs(y) / (2.0 * p);
  } else {
    q = std::sqrt(0.5 * (r - x));
    p = std::abs(y) / (2.0 * q);
  }
  return y > 0.0 ? Cpx(p, q) : Cpx(-p, q);
}

inline Cpx sqrt_up(Cpx w) { return sqrt_up(w.real(), w.imag()); }

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool valid() const { return x1 >= x0 && y1 >= y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(Cpx p) const {
    return p.real() >= x0 && p.real() <= x1 && p.imag() >= y0 && p.imag() <= y1;
  }
  Rect inflated(double pad) const { return {x0 - pad, y0 - pad, x1 + pad, y1 + pad}; }
  Cpx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }

  static Rect square(Cpx center, double side) {
    const double h = 0.5 * side;
    return {center.real() - h, center.imag() - h, center.real() + h, center.imag() + h};
  }
};

double dist_point_segment(Cpx p, Cpx a, Cpx b);

// Exact test whether the closed segment [a,b] meets the closed rectangle.
bool segment_intersects_rect(Cpx a, Cpx b, const Rect& r);

// First intersection parameter of segment a->b with segment c->d, if any.
std::optional<double> segment_segment_param(Cpx a, Cpx b, Cpx c, Cpx d);

// KD-tree over points; nearest-neighbour distances in O(log n) at any range.
// Combined with the maximum segment length it lower-bounds the distance to a
// polyline, which is all the far field of a walker needs.
class PointTree {
 public:
  PointTree() = default;
  explicit PointTree(std::span<const Cpx> points);

  bool built() const { return !pts_.empty(); }
  double nearest(Cpx p) const;

 private:
  // median-split tree stored implicitly in pts_: the median of each range is
  // the node point, halves are the subtrees, axis alternates with depth
  void build(std::size_t begin, std::size_t end, int axis);
  void query(std::size_t begin, std::size_t end, int axis, Cpx p, double& best) const;

  std::vector<Cpx> pts_;
};

// Uniform bucket grid over a polyline, for distance queries and crossing
// tests against many segments. Cells index segment ids whose bounding box
// overlaps them.
class SegmentGrid {
 public:
  SegmentGrid() = default;
  // cell <= 0 picks a cell size from the mean segment length.
  SegmentGrid(std::span<const Cpx> points, double cell = 0.0);

  bool built() const { return nx_ > 0; }
  std::size_t segment_count() const { return pts_.size() > 0 ? pts_.size() - 1 : 0; }

  // Exact distance from p to the polyline, or `cutoff` if every segment is
  // farther than that.
  double distance(Cpx p, double cutoff) const;

  // True when some segment lies within eps of p.
  bool within(Cpx p, double eps) const { return distance(p, eps * (1 + 1e-12)) <= eps; }

  // Earliest parameter t in [0,1] at which the segment p->q crosses the
  // polyline, if it does.
  std::optional<double> first_crossing(Cpx p, Cpx q) const;

 private:
  void cell_range(double lo, double hi, double origin, int n, int& i0, int& i1) const;

  std::vector<Cpx> pts_;
  std::vector<std::uint32_t> cell_offsets_;
  std::vector<std::uint32_t> cell_items_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 0, ny_ = 0;
};

}  // namespace sle
