#include "slesim/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/parallel.hpp"
#include "slesim/rng.hpp"

namespace sle {

std::pair<DrivingPath, Trace> sample_chordal(const SamplerConfig& cfg, const TraceOptions& topts) {
  DrivingPath d = sample_chordal_driving(cfg);
  Trace tr = compute_trace(d, topts);
  return {std::move(d), std::move(tr)};
}

void RadialTarget::validate() const {
  require(z.imag() > 0.0, Errc::param, "radial target must have Im(z) > 0");
  require(stop_upsilon > 0.0, Errc::param, "stop_upsilon must be positive");
  require(stop_upsilon < z.imag(), Errc::param, "stop_upsilon must be below Im(z)");
}

double two_sided_drift(Cpx z_centered, double kappa) {
  const double a = 2.0 / kappa;
  const double x = z_centered.real(), y = z_centered.imag();
  const double m2 = x * x + y * y;
  // Drift of log M under the driving noise; pulls the driving toward the
  // marked point so the curve is steered through it.
  return (4.0 * a - 1.0) * x / m2;
}

TwoSidedResult sample_two_sided(const SamplerConfig& cfg, const RadialTarget& target,
                                const TraceOptions& topts) {
  cfg.validate();
  target.validate();
  const double a = cfg.a();
  TwoSidedResult out;
  DrivingPath& d = out.driving;
  d.kappa = cfg.kappa;
  d.a = a;
  d.times.push_back(0.0);
  d.values.push_back(0.0);

  FlowState s;
  s.zr = target.z.real();
  s.zi = target.z.imag();
  CounterRng rng(cfg.seed, cfg.replica, rng_stream::two_sided);

  double t = 0.0, v = 0.0;
  const double cap_from = 2.0 * target.stop_upsilon;
  while (t < cfg.t_max) {
    const double ups = s.upsilon();
    if (ups <= target.stop_upsilon) {
      out.reached = true;
      break;
    }
    double dt = cfg.dt;
    if (ups < cap_from) {
      const double frac = (ups / cap_from) * (ups / cap_from);
      dt = std::max(cfg.dt * frac, cfg.dt * 1e-6);
    }
    dt = std::min(dt, cfg.t_max - t);
    const double dv = two_sided_drift(s.z(), cfg.kappa) * dt + std::sqrt(dt) * rng.gaussian();
    flow_advance(s, dv, dt, a, t);
    if (!s.alive) {
      out.swallowed_early = !s.escaped;
      break;
    }
    t += dt;
    v += dv;
    d.times.push_back(t);
    d.values.push_back(v);
  }
  out.final_upsilon = s.alive ? s.upsilon() : 0.0;
  out.final_time = t;
  if (d.times.size() >= 2) out.trace = compute_trace(d, topts);
  return out;
}

std::pair<DrivingPath, Trace> rescale(const DrivingPath& d, const Trace& tr, double r) {
  return {rescale_driving(d, r), rescale_trace(tr, r)};
}

namespace {

// Refinement targets: full resolution near the region, relaxed in an outer
// band, unconstrained elsewhere.
struct StepBudget {
  Rect near_rect, far_rect;
  double near_step, far_step, margin_factor;

  // 0 = leave alone, otherwise the step the segment must satisfy
  double target_for(Cpx p0, Cpx p1, double len) const {
    const double pad = margin_factor * len;
    if (segment_intersects_rect(p0, p1, near_rect.inflated(pad))) return near_step;
    if (segment_intersects_rect(p0, p1, far_rect.inflated(pad))) return far_step;
    return 0.0;
  }
};

}  // namespace

RefinedSample sample_trace_refined(const SamplerConfig& cfg, const Rect& region,
                                   double target_step, const RefineOptions& opts) {
  cfg.validate();
  require(region.valid() && !region.empty(), Errc::param, "refinement region is empty");
  require(target_step > 0.0, Errc::param, "target_step must be positive");

  RefinableDriving rd(cfg);
  const TraceOptions topts{0.1, opts.workers};
  Trace tr = compute_trace(rd.path(), topts);

  const StepBudget budget{region.inflated(opts.pad_near), region.inflated(opts.pad_far),
                          target_step, opts.far_step_factor * target_step, opts.margin_factor};

  RefinedSample out;
  for (int round = 0; round < opts.max_rounds; ++round) {
    const DrivingPath& d = rd.path();
    std::vector<std::size_t> marks;
    for (std::size_t i = 0; i + 1 < tr.points.size(); ++i) {
      const Cpx p0 = tr.points[i], p1 = tr.points[i + 1];
      const double len = std::abs(p1 - p0);
      const double tgt = budget.target_for(p0, p1, len);
      if (tgt > 0.0 && len > tgt) marks.push_back(i);
    }
    if (marks.empty()) break;
    require(d.times.size() + marks.size() <= opts.max_points, Errc::resolution,
            "refinement exceeded the point budget");
    rd.refine(marks);
    out.rounds = round + 1;

    // Only new midpoints need positions for the next detection round; stale
    // neighbours are fine for steering. Rebuild index-aligned arrays.
    const DrivingPath& d2 = rd.path();
    std::vector<Cpx> pts(d2.times.size());
    std::vector<std::uint8_t> deg(d2.times.size(), 0);
    std::vector<std::size_t> fresh;
    fresh.reserve(marks.size());
    {
      // marks are indices into the old grid; each split inserts one point
      std::size_t shift = 0, mark_pos = 0;
      for (std::size_t i = 0; i < tr.points.size(); ++i) {
        pts[i + shift] = tr.points[i];
        deg[i + shift] = tr.degenerate[i];
        if (mark_pos < marks.size() && marks[mark_pos] == i) {
          fresh.push_back(i + shift + 1);
          ++shift;
          ++mark_pos;
        }
      }
    }
    {
      std::vector<double> c2a(d2.times.size(), 0.0);
      for (std::size_t j = 1; j < d2.times.size(); ++j)
        c2a[j] = 2.0 * d2.a * (d2.times[j] - d2.times[j - 1]);
      const std::int64_t nf = std::int64_t(fresh.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_workers(opts.workers))
      for (std::int64_t fi = 0; fi < nf; ++fi) {
        const std::size_t k = fresh[std::size_t(fi)];
        bool dg = false;
        const double off = 0.1 * std::sqrt(d2.times[k] - d2.times[k - 1]);
        Cpx g = backward_tip(d2.values, c2a, k, off, dg);
        pts[k] = dg ? Cpx{g.real(), 0.0} : g;
        deg[k] = dg ? 1 : 0;
      }
    }
    tr.times = d2.times;
    tr.points = std::move(pts);
    tr.degenerate = std::move(deg);
  }

  // Consistent final pass: every tip recomputed on the final grid.
  out.trace = compute_trace(rd.path(), topts);
  out.driving = rd.path();
  return out;
}

}  // namespace sle
