#include "slesim/loewner.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/parallel.hpp"

namespace sle {

void flow_advance(FlowState& s, double dv, double dt, double a, double t0, double escape_bound) {
  if (!s.alive) return;
  const double c = 2.0 * a * dt;
  // Branch-cut crossing: the slit absorbs points sitting on its axis.
  if (s.zr == 0.0 && s.zi * s.zi <= c) {
    s.alive = false;
    s.swallow_time = t0 + 0.5 * dt;
    return;
  }
  const double ur = s.zr * s.zr - s.zi * s.zi + c;
  const double ui = 2.0 * s.zr * s.zi;
  const Cpx w = sqrt_up(ur, ui);
  const double zabs = std::sqrt(s.zr * s.zr + s.zi * s.zi);
  const double wabs = std::sqrt(w.real() * w.real() + w.imag() * w.imag());
  s.gprime *= zabs / wabs;
  s.zr = w.real() - dv;
  s.zi = w.imag();
  if (s.zi <= 0.0) {  // numeric absorption
    s.alive = false;
    s.swallow_time = t0 + 0.5 * dt;
    return;
  }
  if (std::abs(s.zr) > escape_bound || s.zi > escape_bound) {
    s.alive = false;
    s.escaped = true;
  }
}

SlitStepResult slit_step(Cpx z, double dv, double dt, double a) {
  require(dt > 0.0, Errc::param, "slit_step requires dt > 0");
  require(z.imag() >= 0.0, Errc::domain, "slit_step requires Im(z) >= 0");
  FlowState s;
  s.zr = z.real();
  s.zi = z.imag();
  if (z.imag() == 0.0 && z.real() == 0.0) return {Cpx{}, true};  // slit base
  if (z.imag() == 0.0) {
    // boundary point: real axis maps into itself
    const double g = std::sqrt(z.real() * z.real() + 2.0 * a * dt);
    return {Cpx{std::copysign(g, z.real()) - dv, 0.0}, false};
  }
  flow_advance(s, dv, dt, a, 0.0);
  if (!s.alive && !s.escaped) return {Cpx{}, true};
  return {s.z(), false};
}

PointTrajectory evolve_point(const DrivingPath& driving, Cpx z, const EvolveOptions& opts) {
  require(z.imag() > 0.0, Errc::domain, "evolve_point requires Im(z) > 0");
  driving.validate();
  PointTrajectory traj;
  traj.z0 = z;
  FlowState s;
  s.zr = z.real();
  s.zi = z.imag();
  const std::size_t n = driving.step_count();
  traj.samples.reserve(n / std::max<std::size_t>(opts.record_every, 1) + 2);
  traj.samples.push_back({0.0, z, z.imag(), s.sine_arg(), 1.0});
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = driving.times[i + 1] - driving.times[i];
    const double dv = driving.values[i + 1] - driving.values[i];
    flow_advance(s, dv, dt, driving.a, driving.times[i], opts.escape_bound);
    if (!s.alive) {
      if (!s.escaped) traj.swallow_time = s.swallow_time;
      traj.escaped = s.escaped;
      break;
    }
    if ((i + 1) % std::max<std::size_t>(opts.record_every, 1) == 0 || i + 1 == n) {
      traj.samples.push_back({driving.times[i + 1], s.z(), s.upsilon(), s.sine_arg(), s.gprime});
    }
    if (opts.upsilon_floor > 0.0 && s.upsilon() < opts.upsilon_floor) break;
  }
  return traj;
}

std::size_t Trace::degenerate_count() const {
  std::size_t n = 0;
  for (auto f : degenerate) n += f;
  return n;
}

Rect Trace::bounding_box() const {
  Rect r;
  if (points.empty()) return r;
  r.x0 = r.x1 = points[0].real();
  r.y0 = r.y1 = points[0].imag();
  for (const Cpx& p : points) {
    r.x0 = std::min(r.x0, p.real());
    r.x1 = std::max(r.x1, p.real());
    r.y0 = std::min(r.y0, p.imag());
    r.y1 = std::max(r.y1, p.imag());
  }
  return r;
}

Cpx backward_tip(std::span<const double> values, std::span<const double> c2a, std::size_t k,
                 double offset, bool& degenerate) {
  double wr = values[k], wi = offset;
  for (std::size_t j = k; j > 0; --j) {
    const double vj = values[j - 1];
    const double br = wr - vj;
    const double ur = br * br - wi * wi - c2a[j];
    const double ui = 2.0 * br * wi;
    double p, q;
    if (ui == 0.0) {
      if (ur >= 0.0) {
        p = std::copysign(std::sqrt(ur), br);
        q = 0.0;
      } else {
        p = 0.0;
        q = std::sqrt(-ur);
      }
    } else {
      const double r = std::sqrt(ur * ur + ui * ui);
      if (ur >= 0.0) {
        p = std::sqrt(0.5 * (r + ur));
        q = std::abs(ui) / (2.0 * p);
      } else {
        q = std::sqrt(0.5 * (r - ur));
        p = std::abs(ui) / (2.0 * q);
      }
      if (ui < 0.0) p = -p;
    }
    wr = vj + p;
    wi = q;
  }
  degenerate = !(wi > 0.0);
  return {wr, wi};
}

namespace {

struct TipJob {
  std::span<const double> values;
  std::vector<double> c2a;      // 2 a dt per step, index 1..n
  std::vector<double> offsets;  // per-tip seed height
};

TipJob make_tip_job(const DrivingPath& d, double offset_factor) {
  TipJob job;
  job.values = d.values;
  const std::size_t n = d.step_count();
  job.c2a.resize(n + 1, 0.0);
  job.offsets.resize(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double dt = d.times[j] - d.times[j - 1];
    job.c2a[j] = 2.0 * d.a * dt;
    job.offsets[j] = offset_factor * std::sqrt(dt);
  }
  return job;
}

inline void tip_into(const TipJob& job, std::size_t k, std::span<Cpx> out,
                     std::span<std::uint8_t> degenerate) {
  if (k == 0) {
    out[0] = {job.values[0], 0.0};
    degenerate[0] = 0;
    return;
  }
  bool deg = false;
  Cpx g = backward_tip(job.values, job.c2a, k, job.offsets[k], deg);
  if (deg) g = {g.real(), 0.0};  // degenerate tips are reported on the axis
  out[k] = g;
  degenerate[k] = deg ? 1 : 0;
}

// One inverse elementary map, branch-light so lanes schedule well.
inline void inverse_map_lane(double vj, double c, double& wr, double& wi) {
  const double br = wr - vj;
  const double ur = br * br - wi * wi - c;
  const double ui = 2.0 * br * wi;
  double p, q;
  if (ui == 0.0) {
    if (ur >= 0.0) {
      p = std::copysign(std::sqrt(ur), br);
      q = 0.0;
    } else {
      p = 0.0;
      q = std::sqrt(-ur);
    }
  } else {
    const double r = std::sqrt(ur * ur + ui * ui);
    const double t = std::sqrt(0.5 * (r + std::abs(ur)));
    const double u = std::abs(ui) / (2.0 * t);
    const double p0 = ur >= 0.0 ? t : u;
    q = ur >= 0.0 ? u : t;
    p = ui < 0.0 ? -p0 : p0;
  }
  wr = vj + p;
  wi = q;
}

constexpr std::size_t kTipLanes = 8;

// Backward composition for a block of consecutive tips. The chains are
// independent, so running several at once hides the sqrt/div latency of a
// single chain; per-lane arithmetic is identical to backward_tip.
void tips_block(const TipJob& job, std::size_t k0, std::size_t count, std::span<Cpx> out,
                std::span<std::uint8_t> degenerate) {
  double wr[kTipLanes], wi[kTipLanes];
  const std::size_t k_hi = k0 + count - 1;
  for (std::size_t lane = 0; lane < count; ++lane) {
    wr[lane] = job.values[k0 + lane];
    wi[lane] = job.offsets[k0 + lane];
  }
  // staggered joins: lane i enters once j reaches its own tip index
  for (std::size_t j = k_hi; j > k0 && j > 0; --j) {
    const double vj = job.values[j - 1];
    const double c = job.c2a[j];
    for (std::size_t lane = j - k0; lane < count; ++lane)
      inverse_map_lane(vj, c, wr[lane], wi[lane]);
  }
  // uniform tail: all lanes active
  for (std::size_t j = std::min(k0, k_hi); j > 0; --j) {
    const double vj = job.values[j - 1];
    const double c = job.c2a[j];
    for (std::size_t lane = 0; lane < count; ++lane)
      inverse_map_lane(vj, c, wr[lane], wi[lane]);
  }
  for (std::size_t lane = 0; lane < count; ++lane) {
    const std::size_t k = k0 + lane;
    if (k == 0) {
      out[0] = {job.values[0], 0.0};
      degenerate[0] = 0;
      continue;
    }
    const bool deg = !(wi[lane] > 0.0);
    out[k] = deg ? Cpx{wr[lane], 0.0} : Cpx{wr[lane], wi[lane]};
    degenerate[k] = deg ? 1 : 0;
  }
}

}  // namespace

void trace_tips_serial(const DrivingPath& d, double offset_factor, std::span<Cpx> out,
                       std::span<std::uint8_t> degenerate) {
  const TipJob job = make_tip_job(d, offset_factor);
  for (std::size_t k = 0; k < out.size(); ++k) tip_into(job, k, out, degenerate);
}

void trace_tips_parallel(const DrivingPath& d, double offset_factor, std::span<Cpx> out,
                         std::span<std::uint8_t> degenerate, int workers) {
  const TipJob job = make_tip_job(d, offset_factor);
  const std::int64_t n_blocks = (std::int64_t(out.size()) + kTipLanes - 1) / kTipLanes;
  // interleaved schedule balances the linearly growing per-tip cost
#pragma omp parallel for schedule(static, 1) num_threads(resolve_workers(workers))
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    const std::size_t k0 = std::size_t(b) * kTipLanes;
    const std::size_t count = std::min(kTipLanes, out.size() - k0);
    tips_block(job, k0, count, out, degenerate);
  }
}

Trace compute_trace(const DrivingPath& driving, const TraceOptions& opts) {
  driving.validate();
  Trace tr;
  tr.kappa = driving.kappa;
  tr.a = driving.a;
  tr.times = driving.times;
  tr.points.resize(driving.times.size());
  tr.degenerate.assign(driving.times.size(), 0);
  if (opts.workers == 1) {
    trace_tips_serial(driving, opts.offset_factor, tr.points, tr.degenerate);
  } else {
    trace_tips_parallel(driving, opts.offset_factor, tr.points, tr.degenerate, opts.workers);
  }
  return tr;
}

double capacity_coefficient(const DrivingPath& driving) {
  driving.validate();
  // Forward flow of a far probe z = iR, tracking D = g(z) - z directly:
  // with w = g - V, one step adds c/(sqrt(w^2+c)+w), which avoids the
  // catastrophic cancellation of forming g and subtracting z afterwards.
  const double R = 1e8;
  const Cpx z{0.0, R};
  Cpx diff{0.0, 0.0};
  const std::size_t n = driving.step_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 2.0 * driving.a * (driving.times[i + 1] - driving.times[i]);
    const Cpx w = (z - driving.values[i]) + diff;
    const Cpx root = sqrt_up(w * w + c);
    diff += c / (root + w);
  }
  return (diff * z).real();
}

Trace rescale_trace(const Trace& tr, double r) {
  require(r > 0.0, Errc::param, "scale factor must be positive");
  Trace out;
  out.kappa = tr.kappa;
  out.a = tr.a;
  out.times.resize(tr.times.size());
  out.points.resize(tr.points.size());
  out.degenerate = tr.degenerate;
  const double inv_r = 1.0 / r, inv_r2 = inv_r * inv_r;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out.times[i] = tr.times[i] * inv_r2;
    out.points[i] = tr.points[i] * inv_r;
  }
  return out;
}

}  // namespace sle
