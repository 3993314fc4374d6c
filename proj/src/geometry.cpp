#include "slesim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sle {

double dist_point_segment(Cpx p, Cpx a, Cpx b) {
  const double abx = b.real() - a.real(), aby = b.imag() - a.imag();
  const double apx = p.real() - a.real(), apy = p.imag() - a.imag();
  const double len2 = abx * abx + aby * aby;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((apx * abx + apy * aby) / len2, 0.0, 1.0);
  const double dx = apx - t * abx, dy = apy - t * aby;
  return std::sqrt(dx * dx + dy * dy);
}

bool segment_intersects_rect(Cpx a, Cpx b, const Rect& r) {
  // Liang-Barsky clip of [a,b] against the closed rectangle.
  const double dx = b.real() - a.real(), dy = b.imag() - a.imag();
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.real() - r.x0, r.x1 - a.real(), a.imag() - r.y0, r.y1 - a.imag()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        if (t > t1) return false;
        if (t > t0) t0 = t;
      } else {
        if (t < t0) return false;
        if (t < t1) t1 = t;
      }
    }
  }
  return true;
}

std::optional<double> segment_segment_param(Cpx a, Cpx b, Cpx c, Cpx d) {
  const double rx = b.real() - a.real(), ry = b.imag() - a.imag();
  const double sx = d.real() - c.real(), sy = d.imag() - c.imag();
  const double denom = rx * sy - ry * sx;
  const double qpx = c.real() - a.real(), qpy = c.imag() - a.imag();
  if (denom == 0.0) return std::nullopt;  // parallel; grazing contact ignored
  const double t = (qpx * sy - qpy * sx) / denom;
  const double u = (qpx * ry - qpy * rx) / denom;
  if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return t;
  return std::nullopt;
}

PointTree::PointTree(std::span<const Cpx> points) : pts_(points.begin(), points.end()) {
  if (!pts_.empty()) build(0, pts_.size(), 0);
}

void PointTree::build(std::size_t begin, std::size_t end, int axis) {
  if (end - begin <= 1) return;
  const std::size_t mid = begin + (end - begin) / 2;
  auto cmp = [axis](const Cpx& a, const Cpx& b) {
    return axis == 0 ? a.real() < b.real() : a.imag() < b.imag();
  };
  std::nth_element(pts_.begin() + begin, pts_.begin() + mid, pts_.begin() + end, cmp);
  build(begin, mid, 1 - axis);
  build(mid + 1, end, 1 - axis);
}

void PointTree::query(std::size_t begin, std::size_t end, int axis, Cpx p, double& best) const {
  if (begin >= end) return;
  const std::size_t mid = begin + (end - begin) / 2;
  const Cpx& q = pts_[mid];
  best = std::min(best, std::hypot(p.real() - q.real(), p.imag() - q.imag()));
  const double delta = axis == 0 ? p.real() - q.real() : p.imag() - q.imag();
  const auto near_lo = delta < 0.0;
  if (near_lo) {
    query(begin, mid, 1 - axis, p, best);
    if (std::abs(delta) < best) query(mid + 1, end, 1 - axis, p, best);
  } else {
    query(mid + 1, end, 1 - axis, p, best);
    if (std::abs(delta) < best) query(begin, mid, 1 - axis, p, best);
  }
}

double PointTree::nearest(Cpx p) const {
  double best = std::numeric_limits<double>::infinity();
  if (built()) query(0, pts_.size(), 0, p, best);
  return best;
}

SegmentGrid::SegmentGrid(std::span<const Cpx> points, double cell) {
  if (points.size() < 2) return;
  pts_.assign(points.begin(), points.end());
  const std::size_t nseg = pts_.size() - 1;

  double minx = pts_[0].real(), maxx = minx, miny = pts_[0].imag(), maxy = miny;
  double total_len = 0;
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    minx = std::min(minx, pts_[i].real());
    maxx = std::max(maxx, pts_[i].real());
    miny = std::min(miny, pts_[i].imag());
    maxy = std::max(maxy, pts_[i].imag());
    if (i > 0) total_len += std::abs(pts_[i] - pts_[i - 1]);
  }
  if (cell <= 0.0) cell = std::max(2.0 * total_len / double(nseg), 1e-12);
  cell_ = cell;
  x0_ = minx - 0.5 * cell_;
  y0_ = miny - 0.5 * cell_;
  nx_ = std::max(1, int((maxx - x0_) / cell_) + 1);
  ny_ = std::max(1, int((maxy - y0_) / cell_) + 1);
  // keep the bucket table bounded; distances stay exact regardless of cell
  while (std::int64_t(nx_) * ny_ > (1 << 24)) {
    cell_ *= 2.0;
    nx_ = std::max(1, int((maxx - x0_) / cell_) + 1);
    ny_ = std::max(1, int((maxy - y0_) / cell_) + 1);
  }

  std::vector<std::uint32_t> counts(std::size_t(nx_) * ny_ + 1, 0);
  auto for_cells = [&](std::size_t seg, auto&& fn) {
    const Cpx a = pts_[seg], b = pts_[seg + 1];
    int i0, i1, j0, j1;
    cell_range(std::min(a.real(), b.real()), std::max(a.real(), b.real()), x0_, nx_, i0, i1);
    cell_range(std::min(a.imag(), b.imag()), std::max(a.imag(), b.imag()), y0_, ny_, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) fn(std::size_t(j) * nx_ + i);
  };
  for (std::size_t s = 0; s < nseg; ++s) for_cells(s, [&](std::size_t c) { ++counts[c + 1]; });
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  cell_offsets_ = counts;
  cell_items_.resize(counts.back());
  std::vector<std::uint32_t> fill(std::size_t(nx_) * ny_, 0);
  for (std::size_t s = 0; s < nseg; ++s)
    for_cells(s, [&](std::size_t c) { cell_items_[cell_offsets_[c] + fill[c]++] = std::uint32_t(s); });
}

void SegmentGrid::cell_range(double lo, double hi, double origin, int n, int& i0, int& i1) const {
  i0 = std::clamp(int(std::floor((lo - origin) / cell_)), 0, n - 1);
  i1 = std::clamp(int(std::floor((hi - origin) / cell_)), 0, n - 1);
}

double SegmentGrid::distance(Cpx p, double cutoff) const {
  if (!built()) return cutoff;
  // clamp p into the grid; rings around the clamped cell with the triangle
  // inequality correction |p - q| keep the bound exact
  const double qx = std::clamp(p.real(), x0_, x0_ + nx_ * cell_);
  const double qy = std::clamp(p.imag(), y0_, y0_ + ny_ * cell_);
  const double dc = std::hypot(p.real() - qx, p.imag() - qy);
  if (dc >= cutoff) return cutoff;

  const int ci = std::clamp(int((qx - x0_) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(int((qy - y0_) / cell_), 0, ny_ - 1);
  double best = cutoff;
  const int max_ring = std::max(nx_, ny_);
  for (int ring = 0; ring <= max_ring; ++ring) {
    const double lb = std::max(0.0, (ring - 1) * cell_ - dc);
    if (lb >= best) break;
    const int i0 = ci - ring, i1 = ci + ring, j0 = cj - ring, j1 = cj + ring;
    auto scan_cell = [&](int i, int j) {
      if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return;
      const std::size_t c = std::size_t(j) * nx_ + i;
      for (std::uint32_t k = cell_offsets_[c]; k < cell_offsets_[c + 1]; ++k) {
        const std::uint32_t s = cell_items_[k];
        best = std::min(best, dist_point_segment(p, pts_[s], pts_[s + 1]));
      }
    };
    if (ring == 0) {
      scan_cell(ci, cj);
    } else {
      for (int i = i0; i <= i1; ++i) {
        scan_cell(i, j0);
        scan_cell(i, j1);
      }
      for (int j = j0 + 1; j < j1; ++j) {
        scan_cell(i0, j);
        scan_cell(i1, j);
      }
    }
  }
  return best;
}

std::optional<double> SegmentGrid::first_crossing(Cpx p, Cpx q) const {
  if (!built()) return std::nullopt;
  int i0, i1, j0, j1;
  cell_range(std::min(p.real(), q.real()), std::max(p.real(), q.real()), x0_, nx_, i0, i1);
  cell_range(std::min(p.imag(), q.imag()), std::max(p.imag(), q.imag()), y0_, ny_, j0, j1);
  double best = std::numeric_limits<double>::infinity();
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const std::size_t c = std::size_t(j) * nx_ + i;
      for (std::uint32_t k = cell_offsets_[c]; k < cell_offsets_[c + 1]; ++k) {
        const std::uint32_t s = cell_items_[k];
        if (auto t = segment_segment_param(p, q, pts_[s], pts_[s + 1])) best = std::min(best, *t);
      }
    }
  }
  if (best == std::numeric_limits<double>::infinity()) return std::nullopt;
  return best;
}

}  // namespace sle
