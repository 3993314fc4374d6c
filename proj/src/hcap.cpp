#include "slesim/hcap.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/parallel.hpp"
#include "slesim/rng.hpp"

namespace sle {

namespace {

struct HullIndex {
  SegmentGrid grid;   // exact distances and crossing tests near the hull
  PointTree tree;     // far-field lower bounds
  Rect bbox;
  double seg_max = 0;
  double radius = 0;

  explicit HullIndex(std::span<const Cpx> hull) : grid(hull), tree(hull) {
    bbox = {hull[0].real(), hull[0].imag(), hull[0].real(), hull[0].imag()};
    for (std::size_t i = 0; i < hull.size(); ++i) {
      if (i > 0) seg_max = std::max(seg_max, std::abs(hull[i] - hull[i - 1]));
      radius = std::max(radius, std::abs(hull[i]));
      bbox.x0 = std::min(bbox.x0, hull[i].real());
      bbox.x1 = std::max(bbox.x1, hull[i].real());
      bbox.y0 = std::min(bbox.y0, hull[i].imag());
      bbox.y1 = std::max(bbox.y1, hull[i].imag());
    }
  }

  // Lower bound on the distance to the polyline; exact (up to `cutoff`) when
  // the point is within `near` of it.
  double distance_bound(Cpx p, double near, double cutoff, bool& exact) const {
    const double lb = tree.nearest(p) - 0.5 * seg_max;
    if (lb > near) {
      exact = false;
      return lb;
    }
    exact = true;
    return grid.distance(p, cutoff);
  }
};

}  // namespace

HcapEstimate hcap_mc_polyline(std::span<const Cpx> hull, std::uint64_t n_walkers,
                              const HcapOptions& opts) {
  HcapEstimate est;
  est.walkers = n_walkers;
  if (hull.size() < 2) return est;  // empty hull: hcap = 0

  const HullIndex index(hull);
  const double y0 = opts.y0 > 0.0 ? opts.y0 : std::max(opts.y0_factor * index.radius, 1.0);
  est.y0 = y0;
  const double near = std::max(4.0 * index.seg_max, 16.0 * opts.band);

  double sum = 0.0, sumsq = 0.0;
  std::uint64_t hull_hits = 0, budget_exceeded = 0;
  const std::int64_t n = std::int64_t(n_walkers);
#pragma omp parallel for schedule(static) reduction(+ : sum, sumsq, hull_hits, budget_exceeded) \
    num_threads(resolve_workers(opts.workers))
  for (std::int64_t w = 0; w < n; ++w) {
    CounterRng rng(opts.seed, std::uint64_t(w), rng_stream::hcap);
    double px = 0.0, py = y0;
    double contrib = 0.0;
    bool done = false;
    for (std::uint64_t step = 0; step < opts.max_steps; ++step) {
      bool exact = false;
      const double d_hull = index.distance_bound({px, py}, near, 4.0 * near, exact);
      if (exact && d_hull <= opts.band) {
        contrib = py;
        ++hull_hits;
        done = true;
        break;
      }
      if (py <= opts.band) {
        contrib = py;  // on the axis band; Im is already ~0
        done = true;
        break;
      }
      const double d = std::min(d_hull, py);
      const double sigma = d * opts.step_frac;
      const double qx = px + sigma * rng.gaussian();
      const double qy = py + sigma * rng.gaussian();
      const double step_len = std::hypot(qx - px, qy - py);
      if (step_len >= d_hull &&
          segment_intersects_rect({px, py}, {qx, qy}, index.bbox.inflated(opts.band))) {
        // rare long jump: it may have tunnelled through the hull
        if (auto t = index.grid.first_crossing({px, py}, {qx, qy})) {
          contrib = py + *t * (qy - py);
          ++hull_hits;
          done = true;
          break;
        }
      }
      if (qy <= 0.0) {  // crossed the real axis
        contrib = 0.0;
        done = true;
        break;
      }
      px = qx;
      py = qy;
    }
    if (!done) {
      ++budget_exceeded;
      contrib = 0.0;
    }
    const double x = y0 * contrib;
    sum += x;
    sumsq += x * x;
  }
  if (budget_exceeded > 0)
    fail(Errc::walker_budget,
         std::to_string(budget_exceeded) + " capacity walkers exceeded the step budget");

  const double nn = double(n_walkers);
  est.value = sum / nn;
  const double var = std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1.0));
  est.stderr_ = std::sqrt(var / nn);
  est.hull_hits = hull_hits;
  return est;
}

HcapEstimate hcap_mc(const Trace& trace, double t, std::uint64_t n_walkers,
                     const HcapOptions& opts) {
  require(t >= 0.0, Errc::param, "time must be non-negative");
  // prefix of the trace up to capacity time t
  std::size_t count = 0;
  while (count < trace.times.size() && trace.times[count] <= t * (1.0 + 1e-12)) ++count;
  require(count > 0, Errc::param, "requested time precedes the grid");
  if (count < 2) return HcapEstimate{0.0, 0.0, 0.0, n_walkers, 0};
  return hcap_mc_polyline(std::span<const Cpx>(trace.points.data(), count), n_walkers, opts);
}

}  // namespace sle
