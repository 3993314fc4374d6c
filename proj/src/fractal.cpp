#include "slesim/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "slesim/parallel.hpp"
#include "slesim/observables.hpp"
#include "slesim/sampler.hpp"
#include "slesim/stats.hpp"

namespace sle {

namespace {

std::int64_t pow_int(int base, int exp) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

std::uint64_t pack(std::int64_t n1, std::int64_t n2) {
  return (std::uint64_t(std::uint32_t(n1)) << 32) | std::uint64_t(std::uint32_t(n2));
}

}  // namespace

double LadicSquare::side() const { return std::pow(double(base), -double(level)); }

Rect LadicSquare::rect() const {
  const double s = side();
  return {offset.real() + double(n1) * s, offset.imag() + double(n2) * s,
          offset.real() + double(n1 + 1) * s, offset.imag() + double(n2 + 1) * s};
}

LadicSquare LadicSquare::ancestor(int level_up) const {
  require(level_up >= 0 && level_up <= level, Errc::param, "bad ancestor level");
  const std::int64_t f = pow_int(base, level_up);
  return {level - level_up, n1 / f, n2 / f, base, offset};
}

double MeasureField::mass(const LadicSquare& sq) const {
  if (sq.level < level_min || sq.level > level_max) return 0.0;
  const auto& m = mass_by_level[std::size_t(sq.level - level_min)];
  const auto it = m.find(pack(sq.n1, sq.n2));
  return it == m.end() ? 0.0 : it->second;
}

std::size_t MeasureField::nonzero_count(int level) const {
  if (level < level_min || level > level_max) return 0;
  return mass_by_level[std::size_t(level - level_min)].size();
}

namespace {

// Tiled sweep over the cells of a pitch-grid on `region` that lie within
// `eps` of the polyline. `fn(pix_x0, pix_y0, words, tile_w, tile_h)` runs once
// per non-empty tile; tiles are disjoint, so per-tile work needs no locking.
template <class TileFn>
void covered_cell_tiles(std::span<const Cpx> pts, const Rect& region, double eps, double pitch,
                        int tile_pix, int workers, TileFn&& fn) {
  if (pts.size() < 2 || region.empty()) return;
  const std::int64_t nx = std::int64_t(std::ceil(region.width() / pitch));
  const std::int64_t ny = std::int64_t(std::ceil(region.height() / pitch));
  if (nx <= 0 || ny <= 0) return;
  const std::int64_t tiles_x = (nx + tile_pix - 1) / tile_pix;

  const Rect reach = region.inflated(eps);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> bins;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const Cpx a = pts[s], b = pts[s + 1];
    const double lox = std::min(a.real(), b.real()) - eps;
    const double hix = std::max(a.real(), b.real()) + eps;
    const double loy = std::min(a.imag(), b.imag()) - eps;
    const double hiy = std::max(a.imag(), b.imag()) + eps;
    if (hix < reach.x0 || lox > reach.x1 || hiy < reach.y0 || loy > reach.y1) continue;
    const std::int64_t ix0 = std::clamp<std::int64_t>(
        std::int64_t(std::floor((lox - region.x0) / pitch)), 0, nx - 1);
    const std::int64_t ix1 = std::clamp<std::int64_t>(
        std::int64_t(std::floor((hix - region.x0) / pitch)), 0, nx - 1);
    const std::int64_t iy0 = std::clamp<std::int64_t>(
        std::int64_t(std::floor((loy - region.y0) / pitch)), 0, ny - 1);
    const std::int64_t iy1 = std::clamp<std::int64_t>(
        std::int64_t(std::floor((hiy - region.y0) / pitch)), 0, ny - 1);
    for (std::int64_t tj = iy0 / tile_pix; tj <= iy1 / tile_pix; ++tj)
      for (std::int64_t ti = ix0 / tile_pix; ti <= ix1 / tile_pix; ++ti)
        bins.emplace_back(std::uint64_t(tj) * std::uint64_t(tiles_x) + std::uint64_t(ti),
                          std::uint32_t(s));
  }
  if (bins.empty()) return;
  std::sort(bins.begin(), bins.end());

  std::vector<std::size_t> tile_starts;
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (i == 0 || bins[i].first != bins[i - 1].first) tile_starts.push_back(i);
  tile_starts.push_back(bins.size());

  const std::int64_t n_tiles = std::int64_t(tile_starts.size()) - 1;
#pragma omp parallel num_threads(resolve_workers(workers))
  {
    std::vector<std::uint64_t> words;
#pragma omp for schedule(dynamic)
    for (std::int64_t t = 0; t < n_tiles; ++t) {
      const std::size_t lo = tile_starts[std::size_t(t)], hi = tile_starts[std::size_t(t) + 1];
      const std::uint64_t tile = bins[lo].first;
      const std::int64_t ti = std::int64_t(tile % std::uint64_t(tiles_x));
      const std::int64_t tj = std::int64_t(tile / std::uint64_t(tiles_x));
      const std::int64_t px0 = ti * tile_pix, py0 = tj * tile_pix;
      const std::int64_t tw = std::min<std::int64_t>(tile_pix, nx - px0);
      const std::int64_t th = std::min<std::int64_t>(tile_pix, ny - py0);
      const std::size_t nwords = std::size_t((tw * th + 63) / 64);
      words.assign(nwords, 0);
      for (std::size_t b = lo; b < hi; ++b) {
        const std::uint32_t s = bins[b].second;
        const Cpx a = pts[s], bb = pts[s + 1];
        const double lox = std::min(a.real(), bb.real()) - eps;
        const double hix = std::max(a.real(), bb.real()) + eps;
        const double loy = std::min(a.imag(), bb.imag()) - eps;
        const double hiy = std::max(a.imag(), bb.imag()) + eps;
        const std::int64_t ix0 = std::max<std::int64_t>(
            px0, std::int64_t(std::floor((lox - region.x0) / pitch)));
        const std::int64_t ix1 = std::min<std::int64_t>(
            px0 + tw - 1, std::int64_t(std::floor((hix - region.x0) / pitch)));
        const std::int64_t iy0 = std::max<std::int64_t>(
            py0, std::int64_t(std::floor((loy - region.y0) / pitch)));
        const std::int64_t iy1 = std::min<std::int64_t>(
            py0 + th - 1, std::int64_t(std::floor((hiy - region.y0) / pitch)));
        for (std::int64_t j = iy0; j <= iy1; ++j) {
          const double cy = region.y0 + (double(j) + 0.5) * pitch;
          if (cy < region.y0 || cy > region.y1) continue;
          for (std::int64_t i = ix0; i <= ix1; ++i) {
            const double cx = region.x0 + (double(i) + 0.5) * pitch;
            if (cx < region.x0 || cx > region.x1) continue;
            if (dist_point_segment({cx, cy}, a, bb) <= eps) {
              const std::size_t bit = std::size_t((j - py0) * tw + (i - px0));
              words[bit >> 6] |= (std::uint64_t(1) << (bit & 63));
            }
          }
        }
      }
      fn(px0, py0, words, tw, th);
    }
  }
}

void check_resolution(std::span<const Cpx> pts, const Rect& reach, double max_len,
                      const char* what) {
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const Cpx a = pts[s], b = pts[s + 1];
    if (!segment_intersects_rect(a, b, reach)) continue;
    if (std::abs(b - a) > max_len)
      fail(Errc::resolution, std::string(what) + ": trace step " + std::to_string(std::abs(b - a)) +
                                 " exceeds " + std::to_string(max_len));
  }
}

std::uint64_t covered_cell_count(std::span<const Cpx> pts, const Rect& region, double eps,
                                 int workers) {
  const double pitch = eps / 4.0;
  std::uint64_t total = 0;
  covered_cell_tiles(pts, region, eps, pitch, 1024, workers,
                     [&](std::int64_t, std::int64_t, const std::vector<std::uint64_t>& words,
                         std::int64_t, std::int64_t) {
                       std::uint64_t c = 0;
                       for (std::uint64_t w : words) c += std::uint64_t(__builtin_popcountll(w));
#pragma omp atomic
                       total += c;
                     });
  return total;
}

}  // namespace

std::uint64_t minkowski_cells_serial(std::span<const Cpx> points, const Rect& region,
                                     double eps_mink) {
  return covered_cell_count(points, region, eps_mink, 1);
}

std::uint64_t minkowski_cells_parallel(std::span<const Cpx> points, const Rect& region,
                                       double eps_mink, int workers) {
  return covered_cell_count(points, region, eps_mink, workers);
}

double minkowski_mass(std::span<const Cpx> points, const Rect& region, double eps_mink, double d,
                      int workers) {
  require(region.valid(), Errc::param, "invalid region");
  require(eps_mink > 0.0, Errc::param, "eps_mink must be positive");
  require(eps_mink <= std::max(region.width(), region.height()) / 10.0 || region.empty(),
          Errc::param, "eps_mink too large for the region");
  if (points.size() < 2 || region.empty()) return 0.0;
  check_resolution(points, region.inflated(eps_mink), eps_mink, "minkowski_mass");
  const double pitch = eps_mink / 4.0;
  const std::uint64_t cells = covered_cell_count(points, region, eps_mink, workers);
  return std::pow(eps_mink, d - 2.0) * double(cells) * pitch * pitch;
}

MeasureField mu_field(const Trace& trace, int l, int m, int M, Cpx z0, double d, int workers) {
  require(l >= 2, Errc::param, "base l must be at least 2");
  require(m >= 0 && m <= M, Errc::param, "need 0 <= m <= M");
  MeasureField field;
  field.base = l;
  field.level_min = m;
  field.level_max = M;
  field.offset = z0;
  field.d = d;
  field.mass_by_level.resize(std::size_t(M - m + 1));

  const Rect region{z0.real(), z0.imag(), z0.real() + 1.0, z0.imag() + 1.0};
  const double side_M = std::pow(double(l), -double(M));
  check_resolution(trace.points, region.inflated(side_M), side_M / 10.0, "mu_field");

  for (int k = m; k <= M; ++k) {
    const double side = std::pow(double(l), -double(k));
    const double eps = side / 10.0;
    const double pitch = eps / 4.0;  // 40 cells per square side
    auto& masses = field.mass_by_level[std::size_t(k - m)];
    const double cell_area = pitch * pitch;
    const double scale = std::pow(eps, d - 2.0) * cell_area;
    covered_cell_tiles(
        trace.points, region, eps, pitch, 640, workers,
        [&](std::int64_t px0, std::int64_t py0, const std::vector<std::uint64_t>& words,
            std::int64_t tw, std::int64_t th) {
          // 40 | 640, so level squares never span tiles
          std::unordered_map<std::uint64_t, std::uint32_t> local;
          for (std::int64_t j = 0; j < th; ++j) {
            for (std::int64_t i = 0; i < tw; ++i) {
              const std::size_t bit = std::size_t(j * tw + i);
              if (!(words[bit >> 6] & (std::uint64_t(1) << (bit & 63)))) continue;
              const std::int64_t n1 = (px0 + i) / 40, n2 = (py0 + j) / 40;
              ++local[pack(n1, n2)];
            }
          }
#pragma omp critical(slesim_mu_field_merge)
          for (const auto& [key, cnt] : local) masses[key] += scale * double(cnt);
        });
  }
  return field;
}

std::vector<LadicSquare> occupancy(const Trace& trace, int l, int level, Cpx z0,
                                   double max_step_frac) {
  require(l >= 2 && level >= 0, Errc::param, "bad grid parameters");
  require(max_step_frac > 0.0, Errc::param, "max_step_frac must be positive");
  const std::int64_t n = pow_int(l, level);
  require(n <= (1 << 14), Errc::param, "occupancy level too deep to enumerate");
  const double side = 1.0 / double(n);
  const Rect region{z0.real(), z0.imag(), z0.real() + 1.0, z0.imag() + 1.0};
  check_resolution(trace.points, region.inflated(2.0 * side), side * max_step_frac, "occupancy");

  std::vector<std::uint64_t> bits(std::size_t((n * n + 63) / 64), 0);
  const std::int64_t nseg = std::int64_t(trace.points.size()) - 1;
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < nseg; ++s) {
    const Cpx a = trace.points[std::size_t(s)], b = trace.points[std::size_t(s) + 1];
    const double lox = std::min(a.real(), b.real()), hix = std::max(a.real(), b.real());
    const double loy = std::min(a.imag(), b.imag()), hiy = std::max(a.imag(), b.imag());
    if (hix < region.x0 || lox > region.x1 || hiy < region.y0 || loy > region.y1) continue;
    const std::int64_t i0 =
        std::clamp<std::int64_t>(std::int64_t(std::floor((lox - z0.real()) / side)), 0, n - 1);
    const std::int64_t i1 =
        std::clamp<std::int64_t>(std::int64_t(std::floor((hix - z0.real()) / side)), 0, n - 1);
    const std::int64_t j0 =
        std::clamp<std::int64_t>(std::int64_t(std::floor((loy - z0.imag()) / side)), 0, n - 1);
    const std::int64_t j1 =
        std::clamp<std::int64_t>(std::int64_t(std::floor((hiy - z0.imag()) / side)), 0, n - 1);
    for (std::int64_t j = j0; j <= j1; ++j) {
      for (std::int64_t i = i0; i <= i1; ++i) {
        const Rect cell{z0.real() + double(i) * side, z0.imag() + double(j) * side,
                        z0.real() + double(i + 1) * side, z0.imag() + double(j + 1) * side};
        if (segment_intersects_rect(a, b, cell)) {
          const std::size_t bit = std::size_t(j * n + i);
#pragma omp atomic
          bits[bit >> 6] |= (std::uint64_t(1) << (bit & 63));
        }
      }
    }
  }
  std::vector<LadicSquare> out;
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i < n; ++i) {
      const std::size_t bit = std::size_t(j * n + i);
      if (bits[bit >> 6] & (std::uint64_t(1) << (bit & 63)))
        out.push_back({level, i, j, l, z0});
    }
  }
  return out;
}

CoverReport build_cover(const MeasureField& field, std::span<const LadicSquare> occupancy_m,
                        double epsilon) {
  require(epsilon > 0.0, Errc::param, "epsilon must be positive");
  const int m = field.level_min;
  const int M = occupancy_m.empty() ? field.level_max + 1 : occupancy_m.front().level;
  CoverReport report;
  report.params = {field.base, m, M, epsilon, field.d, field.offset};
  require(m < M, Errc::param, "need m < M");
  for (const LadicSquare& sq : occupancy_m) {
    require(sq.level == M && sq.base == field.base, Errc::param,
            "occupancy must be at level M on the field grid");
  }

  // admit maximal big squares scanning coarse -> fine
  std::vector<std::unordered_set<std::uint64_t>> admitted(std::size_t(M - m));
  auto has_admitted_ancestor = [&](int level, std::int64_t n1, std::int64_t n2) {
    for (int j = m; j < level; ++j) {
      const std::int64_t f = pow_int(field.base, level - j);
      if (admitted[std::size_t(j - m)].count(pack(n1 / f, n2 / f))) return true;
    }
    return false;
  };

  for (int k = m; k < M; ++k) {
    if (k > field.level_max) break;
    const double weight = std::pow(double(field.base), -field.d * double(k));
    const double threshold = weight / epsilon;
    // deterministic scan order
    std::vector<std::pair<std::uint64_t, double>> entries(
        field.mass_by_level[std::size_t(k - m)].begin(),
        field.mass_by_level[std::size_t(k - m)].end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [key, mass] : entries) {
      if (!(mass > threshold)) continue;
      const std::int64_t n1 = std::int64_t(key >> 32), n2 = std::int64_t(key & 0xffffffffu);
      if (has_admitted_ancestor(k, n1, n2)) continue;
      admitted[std::size_t(k - m)].insert(key);
      report.big_squares.push_back({k, n1, n2, field.base, field.offset});
      report.y1 += weight;
    }
  }

  const double weight_M = std::pow(double(field.base), -field.d * double(M));
  for (const LadicSquare& sq : occupancy_m) {
    if (has_admitted_ancestor(M, sq.n1, sq.n2)) continue;
    report.residual_squares.push_back(sq);
    report.y2 += weight_M;
  }
  return report;
}

double hausdorff_upper(const Trace& trace, double alpha, int scale_level, int l) {
  require(l >= 2 && scale_level >= 0, Errc::param, "bad grid parameters");
  require(alpha >= 0.0, Errc::param, "alpha must be non-negative");
  require(trace.points.size() >= 2, Errc::param, "trace too short");
  const double side = std::pow(double(l), -double(scale_level));
  const Rect box = trace.bounding_box();
  check_resolution(trace.points, box.inflated(side), side / 4.0, "hausdorff_upper");

  std::unordered_set<std::uint64_t> occupied;
  for (std::size_t s = 0; s + 1 < trace.points.size(); ++s) {
    const Cpx a = trace.points[s], b = trace.points[s + 1];
    const std::int64_t i0 = std::int64_t(std::floor((std::min(a.real(), b.real()) - box.x0) / side));
    const std::int64_t i1 = std::int64_t(std::floor((std::max(a.real(), b.real()) - box.x0) / side));
    const std::int64_t j0 = std::int64_t(std::floor((std::min(a.imag(), b.imag()) - box.y0) / side));
    const std::int64_t j1 = std::int64_t(std::floor((std::max(a.imag(), b.imag()) - box.y0) / side));
    for (std::int64_t j = j0; j <= j1; ++j) {
      for (std::int64_t i = i0; i <= i1; ++i) {
        const Rect cell{box.x0 + double(i) * side, box.y0 + double(j) * side,
                        box.x0 + double(i + 1) * side, box.y0 + double(j + 1) * side};
        if (segment_intersects_rect(a, b, cell)) occupied.insert(pack(i, j));
      }
    }
  }
  const double diam = 1.4142135623730950488 * side;
  return double(occupied.size()) * std::pow(diam, alpha);
}

DimensionFit box_dimension(const Trace& trace, int l, int k_min, int k_max,
                           std::optional<Rect> window) {
  require(l >= 2, Errc::param, "base l must be at least 2");
  require(k_max >= k_min + 3, Errc::param, "need at least 4 levels");
  require(trace.points.size() >= 2, Errc::param, "trace too short");
  const Rect win = window.value_or(trace.bounding_box());
  require(win.valid() && !win.empty(), Errc::param, "empty window");

  const double side_min = std::pow(double(l), -double(k_max));
  check_resolution(trace.points, win.inflated(side_min), side_min / 4.0, "box_dimension");

  DimensionFit fit;
  std::vector<double> xs, ys;
  for (int k = k_min; k <= k_max; ++k) {
    const double side = std::pow(double(l), -double(k));
    std::unordered_set<std::uint64_t> occupied;
    const std::int64_t nx = std::int64_t(std::ceil(win.width() / side));
    const std::int64_t ny = std::int64_t(std::ceil(win.height() / side));
    for (std::size_t s = 0; s + 1 < trace.points.size(); ++s) {
      const Cpx a = trace.points[s], b = trace.points[s + 1];
      if (!segment_intersects_rect(a, b, win)) continue;
      const std::int64_t i0 = std::clamp<std::int64_t>(
          std::int64_t(std::floor((std::min(a.real(), b.real()) - win.x0) / side)), 0, nx - 1);
      const std::int64_t i1 = std::clamp<std::int64_t>(
          std::int64_t(std::floor((std::max(a.real(), b.real()) - win.x0) / side)), 0, nx - 1);
      const std::int64_t j0 = std::clamp<std::int64_t>(
          std::int64_t(std::floor((std::min(a.imag(), b.imag()) - win.y0) / side)), 0, ny - 1);
      const std::int64_t j1 = std::clamp<std::int64_t>(
          std::int64_t(std::floor((std::max(a.imag(), b.imag()) - win.y0) / side)), 0, ny - 1);
      for (std::int64_t j = j0; j <= j1; ++j) {
        for (std::int64_t i = i0; i <= i1; ++i) {
          const Rect cell{win.x0 + double(i) * side, win.y0 + double(j) * side,
                          win.x0 + double(i + 1) * side, win.y0 + double(j + 1) * side};
          if (segment_intersects_rect(a, b, cell)) occupied.insert(pack(i, j));
        }
      }
    }
    fit.scales.push_back(side);
    fit.counts.push_back(occupied.size());
    require(!occupied.empty(), Errc::resolution, "no occupied boxes in window");
    xs.push_back(std::log(1.0 / side));
    ys.push_back(std::log(double(occupied.size())));
  }
  const LinFit lf = linear_fit(xs, ys);
  fit.slope = lf.slope;
  fit.r2 = lf.r2;
  return fit;
}

namespace {

LadicSquare chain_square(Cpx z_target, Cpx z0, int level, int l) {
  const std::int64_t n = pow_int(l, level);
  const double ux = z_target.real() - z0.real();
  const double uy = z_target.imag() - z0.imag();
  require(ux >= 0.0 && ux <= 1.0 && uy >= 0.0 && uy <= 1.0, Errc::param,
          "target point must lie in the unit square at z0");
  const std::int64_t n1 = std::clamp<std::int64_t>(std::int64_t(ux * double(n)), 0, n - 1);
  const std::int64_t n2 = std::clamp<std::int64_t>(std::int64_t(uy * double(n)), 0, n - 1);
  return {level, n1, n2, l, z0};
}

std::optional<std::size_t> first_entry(const Trace& tr, const Rect& r, std::size_t from) {
  for (std::size_t i = from; i + 1 < tr.points.size(); ++i)
    if (segment_intersects_rect(tr.points[i], tr.points[i + 1], r)) return i;
  return std::nullopt;
}

}  // namespace

BigSquareMasses big_square_masses(const SamplerConfig& cfg, int k, int l, std::uint64_t n,
                                  double d, const BigSquareOptions& opts) {
  require(k >= 0 && k <= 2, Errc::param, "k must be small (0, 1 or 2)");
  const LadicSquare dk = chain_square(opts.z_target, opts.z0, k, l);
  const LadicSquare dk1 = chain_square(opts.z_target, opts.z0, k + 1, l);
  const Rect rk = dk.rect(), rk1 = dk1.rect();
  const Rect star_k = Rect::square(rk.center(), opts.enlarge * dk.side());
  const Rect star_k1 = Rect::square(rk1.center(), opts.enlarge * dk1.side());
  // the window must close before the curve reaches the level-k square's
  // interior approach; that needs the enlarged child inside the parent
  require(star_k1.x0 >= rk.x0 && star_k1.x1 <= rk.x1 && star_k1.y0 >= rk.y0 &&
              star_k1.y1 <= rk.y1,
          Errc::param, "enlarged child square must sit inside the level-k square");

  const double eps_mass = dk.side() / 10.0;
  const double target = std::min(eps_mass, opts.enlarge * dk1.side() / 8.0);
  const Rect refine_region = rk.inflated(dk.side() / 8.0);

  BigSquareMasses out;
  out.total = n;
  out.threshold_unit = std::pow(double(l), -d * double(k));
  std::vector<double> masses(n, -1.0);
  const std::int64_t nn = std::int64_t(n);
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(opts.workers))
  for (std::int64_t i = 0; i < nn; ++i) {
    SamplerConfig c = cfg;
    c.dt = opts.coarse_dt;
    c.t_max = opts.t_max;
    c.replica = cfg.replica + std::uint32_t(i);
    RefineOptions ropts;
    ropts.workers = 1;
    ropts.pad_near = dk.side() / 8.0;
    ropts.pad_far = dk.side();
    const RefinedSample rs = sample_trace_refined(c, refine_region, target, ropts);
    const Trace& tr = rs.trace;
    if (!first_entry(tr, rk1, 0)) continue;  // deeper square never reached
    const auto e_k = first_entry(tr, star_k, 0);
    if (!e_k) continue;
    const auto e_k1 = first_entry(tr, star_k1, *e_k);
    if (!e_k1) continue;
    const std::size_t lo = *e_k, hi = std::min(*e_k1 + 2, tr.points.size());
    const std::span<const Cpx> window(tr.points.data() + lo, hi - lo);
    masses[std::size_t(i)] = minkowski_mass(window, rk, eps_mass, d, 1);
  }
  for (double m : masses)
    if (m >= 0.0) out.masses.push_back(m);
  return out;
}

BigSquareProb big_square_prob_from_masses(const BigSquareMasses& masses, double epsilon) {
  require(epsilon > 0.0, Errc::param, "epsilon must be positive");
  BigSquareProb out;
  out.total = masses.total;
  out.accepted = masses.masses.size();
  out.threshold = masses.threshold_unit / epsilon;
  if (out.accepted < 100)
    fail(Errc::starved, "only " + std::to_string(out.accepted) + " accepted replicas");
  std::uint64_t below = 0;
  for (double m : masses.masses)
    if (m < out.threshold) ++below;
  out.q_hat = double(below) / double(out.accepted);
  out.stderr_ = wilson_halfwidth(below, out.accepted);
  return out;
}

BigSquareProb big_square_prob_mc(const SamplerConfig& cfg, int k, double epsilon, int l,
                                 std::uint64_t n, const BigSquareOptions& opts) {
  const GreenParams p = GreenParams::for_kappa(cfg.kappa);
  const BigSquareMasses masses = big_square_masses(cfg, k, l, n, p.d, opts);
  return big_square_prob_from_masses(masses, epsilon);
}

}  // namespace sle
