#include "slesim/observables.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/parallel.hpp"
#include "slesim/rng.hpp"
#include "slesim/stats.hpp"

namespace sle {

GreenParams GreenParams::for_kappa(double kappa) {
  require(kappa > 0.0, Errc::domain, "kappa must be positive");
  GreenParams p;
  p.kappa = kappa;
  p.a = 2.0 / kappa;
  p.d = 1.0 + std::min(kappa / 8.0, 1.0);
  return p;
}

double green_h(Cpx z, double kappa) {
  require(z.imag() > 0.0, Errc::domain, "green_h requires Im(z) > 0");
  const GreenParams p = GreenParams::for_kappa(kappa);
  const double y = z.imag();
  const double s = y / std::abs(z);
  return std::pow(y, p.d - 2.0) * std::pow(s, 4.0 * p.a - 1.0);
}

double green_general(double upsilon, double s, double kappa) {
  require(upsilon > 0.0, Errc::domain, "green_general requires Upsilon > 0");
  require(s > 0.0 && s <= 1.0, Errc::domain, "green_general requires S in (0,1]");
  const GreenParams p = GreenParams::for_kappa(kappa);
  return std::pow(upsilon, p.d - 2.0) * std::pow(s, 4.0 * p.a - 1.0);
}

double local_mart(double g_prime_abs, Cpx z_centered, double kappa) {
  require(g_prime_abs > 0.0, Errc::domain, "local_mart requires |g'| > 0");
  const GreenParams p = GreenParams::for_kappa(kappa);
  return std::pow(g_prime_abs, 2.0 - p.d) * green_h(z_centered, kappa);
}

double local_mart(const PointTrajectory& traj, std::size_t sample_index, double kappa) {
  require(sample_index < traj.samples.size(), Errc::dead_point,
          "no sample at this index: point already swallowed");
  const TrajectorySample& s = traj.samples[sample_index];
  if (traj.swallow_time && s.t >= *traj.swallow_time)
    fail(Errc::dead_point, "sample at or past the swallowing time");
  return local_mart(s.g_prime_abs, s.z, kappa);
}

namespace {

double adaptive_simpson(double (*f)(double, double), double p, double lo, double hi, double f_lo,
                        double f_mid, double f_hi, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), mh = 0.5 * (mid + hi);
  const double f_lm = f(lm, p), f_mh = f(mh, p);
  const double h = hi - lo;
  const double whole = h / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  const double left = h / 12.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = h / 12.0 * (f_mid + 4.0 * f_mh + f_hi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, p, lo, mid, f_lo, f_lm, f_mid, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, p, mid, hi, f_mid, f_mh, f_hi, 0.5 * tol, depth - 1);
}

double sin_pow(double x, double p) { return std::pow(std::sin(x), p); }

}  // namespace

double c_star(double kappa) {
  require(kappa > 0.0, Errc::domain, "kappa must be positive");
  const double p = 4.0 * (2.0 / kappa);
  const double pi = 3.14159265358979323846264338327950288;
  const double integral = adaptive_simpson(&sin_pow, p, 0.0, pi, 0.0, 1.0, 0.0, 1e-11, 48);
  return 2.0 / integral;
}

UpsilonLimits upsilon_limits(Cpx z, std::uint64_t n, const SamplerConfig& cfg,
                             const StabilizeOptions& opts) {
  require(z.imag() > 0.0, Errc::domain, "tracked point must have Im(z) > 0");
  cfg.validate();
  const double a = cfg.a();
  const double zmod = std::abs(z);
  // Capacity bound: a hull inside the half-ball of radius R has hcap <= R^2/2,
  // so capacity beyond R^2/2 certifies the hull has left the ball.
  const double t_ball = (opts.ball_factor * zmod) * (opts.ball_factor * zmod) / (2.0 * a);
  const double floor = opts.upsilon_floor_rel * zmod;

  UpsilonLimits out;
  out.values.assign(n, 0.0);
  std::vector<std::uint8_t> ok(n, 0);
  const std::int64_t nn = std::int64_t(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_workers(opts.workers))
  for (std::int64_t i = 0; i < nn; ++i) {
    SamplerConfig c = cfg;
    c.replica = cfg.replica + std::uint32_t(i);
    CounterRng rng(c.seed, c.replica, rng_stream::chordal);
    const double sd = std::sqrt(c.dt);
    FlowState s;
    s.zr = z.real();
    s.zi = z.imag();
    double t = 0.0;
    double last_checkpoint_ups = z.imag();
    double next_checkpoint = 1.0;
    bool settled = false;
    double ups = z.imag();
    const std::size_t steps = std::size_t(std::llround(c.t_max / c.dt));
    for (std::size_t k = 0; k < steps; ++k) {
      flow_advance(s, sd * rng.gaussian(), c.dt, a, t, opts.escape_bound);
      t += c.dt;
      if (!s.alive) {
        if (!s.escaped) ups = 0.0;  // swallowed: conformal radius collapses
        settled = true;
        break;
      }
      ups = s.upsilon();
      if (ups < floor) {
        settled = true;
        break;
      }
      if (t >= next_checkpoint) {
        if (t > t_ball && last_checkpoint_ups / ups - 1.0 < opts.quiet_rel) {
          settled = true;
          break;
        }
        last_checkpoint_ups = ups;
        next_checkpoint += 1.0;
      }
    }
    out.values[std::size_t(i)] = ups;
    ok[std::size_t(i)] = settled ? 1 : 0;
  }
  for (std::uint64_t i = 0; i < n; ++i)
    if (!ok[i]) ++out.unstabilized;
  return out;
}

GreenEstimate green_estimate_from_limits(Cpx z, double epsilon, const UpsilonLimits& lims,
                                         double kappa) {
  const GreenParams p = GreenParams::for_kappa(kappa);
  GreenEstimate est;
  est.z = z;
  est.epsilon = epsilon;
  est.n = lims.values.size();
  for (double u : lims.values)
    if (u <= epsilon) ++est.hits;
  est.p_hat = est.n ? double(est.hits) / double(est.n) : 0.0;
  est.theory = c_star(kappa) * std::pow(epsilon, 2.0 - p.d) * green_h(z, kappa);
  est.ratio = est.theory > 0 ? est.p_hat / est.theory : 0.0;
  est.stderr_ = wilson_halfwidth(est.hits, est.n);
  return est;
}

GreenEstimate green_hit_prob_mc(Cpx z, double epsilon, std::uint64_t n, const SamplerConfig& cfg,
                                const StabilizeOptions& opts) {
  require(epsilon > 0.0, Errc::param, "epsilon must be positive");
  if (epsilon >= z.imag()) {
    // Upsilon_0(z) = Im z already below the threshold
    GreenEstimate est;
    est.z = z;
    est.epsilon = epsilon;
    est.n = n;
    est.hits = n;
    est.p_hat = 1.0;
    const GreenParams p = GreenParams::for_kappa(cfg.kappa);
    est.theory = c_star(cfg.kappa) * std::pow(epsilon, 2.0 - p.d) * green_h(z, cfg.kappa);
    est.ratio = est.theory > 0 ? 1.0 / est.theory : 0.0;
    return est;
  }
  require(epsilon < z.imag() / 4.0, Errc::param,
          "epsilon must be well below Im(z) for the one-point estimate");
  const UpsilonLimits lims = upsilon_limits(z, n, cfg, opts);
  if (double(lims.unstabilized) > opts.horizon_frac * double(n))
    fail(Errc::horizon, "too many replicas without a stabilized Upsilon at t_max");
  return green_estimate_from_limits(z, epsilon, lims, cfg.kappa);
}

std::vector<double> stopped_local_mart(Cpx z, double tau_eps, double t_eval, std::uint64_t n,
                                       const SamplerConfig& cfg, int workers) {
  require(z.imag() > 0.0, Errc::domain, "tracked point must have Im(z) > 0");
  require(t_eval <= cfg.t_max, Errc::param, "evaluation time beyond horizon");
  cfg.validate();
  const double a = cfg.a();
  std::vector<double> out(n, 0.0);
  const std::int64_t nn = std::int64_t(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_workers(workers))
  for (std::int64_t i = 0; i < nn; ++i) {
    CounterRng rng(cfg.seed, cfg.replica + std::uint64_t(i), rng_stream::chordal);
    const double sd = std::sqrt(cfg.dt);
    FlowState s;
    s.zr = z.real();
    s.zi = z.imag();
    double t = 0.0;
    double m = local_mart(1.0, z, cfg.kappa);
    const std::size_t steps = std::size_t(std::llround(t_eval / cfg.dt));
    for (std::size_t k = 0; k < steps; ++k) {
      flow_advance(s, sd * rng.gaussian(), cfg.dt, a, t);
      t += cfg.dt;
      if (!s.alive) break;  // swallowed past tau; M frozen at the last stop
      if (s.upsilon() <= tau_eps) {
        m = local_mart(s.gprime, s.z(), cfg.kappa);
        break;
      }
      m = local_mart(s.gprime, s.z(), cfg.kappa);
    }
    out[std::size_t(i)] = m;
  }
  return out;
}

BoundarySet BoundarySet::half_plane(std::uint32_t neg_tag, std::uint32_t pos_tag, double extent) {
  BoundarySet b;
  b.arcs.push_back({{-extent, 0.0}, {0.0, 0.0}, neg_tag});
  b.arcs.push_back({{0.0, 0.0}, {extent, 0.0}, pos_tag});
  return b;
}

WalkEstimate harmonic_measure_mc(const BoundarySet& boundary, Cpx z, std::uint32_t arc_tag,
                                 std::uint64_t n, const WalkOptions& opts) {
  require(!boundary.arcs.empty(), Errc::param, "boundary must not be empty");
  std::uint64_t hits = 0, budget_exceeded = 0;
  const std::int64_t nn = std::int64_t(n);
#pragma omp parallel for schedule(static) reduction(+ : hits, budget_exceeded) \
    num_threads(resolve_workers(opts.workers))
  for (std::int64_t w = 0; w < nn; ++w) {
    CounterRng rng(opts.seed, std::uint64_t(w), rng_stream::harmonic);
    Cpx p = z;
    bool done = false;
    for (std::uint64_t step = 0; step < opts.max_steps && !done; ++step) {
      double dist = 1e300;
      std::uint32_t tag = 0;
      for (const auto& arc : boundary.arcs) {
        const double d = dist_point_segment(p, arc.a, arc.b);
        if (d < dist) {
          dist = d;
          tag = arc.tag;
        }
      }
      if (dist <= opts.band) {
        if (tag == arc_tag) ++hits;
        done = true;
        break;
      }
      const double sigma = dist * opts.step_frac;
      const Cpx q = p + Cpx{sigma * rng.gaussian(), sigma * rng.gaussian()};
      // long jumps may cross an arc; absorb at the first crossing
      if (std::abs(q - p) >= dist) {
        double best_t = 2.0;
        std::uint32_t best_tag = 0;
        for (const auto& arc : boundary.arcs) {
          if (auto t = segment_segment_param(p, q, arc.a, arc.b)) {
            if (*t < best_t) {
              best_t = *t;
              best_tag = arc.tag;
            }
          }
        }
        if (best_t <= 1.0) {
          if (best_tag == arc_tag) ++hits;
          done = true;
          break;
        }
      }
      p = q;
    }
    if (!done) ++budget_exceeded;
  }
  if (budget_exceeded > 0)
    fail(Errc::walker_budget, std::to_string(budget_exceeded) + " walkers exceeded the step budget");
  WalkEstimate est;
  est.n = n;
  est.p = n ? double(hits) / double(n) : 0.0;
  est.stderr_ = wilson_halfwidth(hits, n);
  return est;
}

double integrate_green(const Rect& region, double kappa, int mesh0) {
  require(region.valid(), Errc::param, "invalid region");
  if (region.empty()) return 0.0;
  require(region.y0 > 0.0, Errc::domain, "region must stay off the real axis");
  int mesh = std::max(mesh0, 2);
  double prev = 0.0;
  for (int iter = 0; iter < 12; ++iter) {
    const double hx = region.width() / mesh, hy = region.height() / mesh;
    double sum = 0.0;
    for (int j = 0; j < mesh; ++j) {
      const double y = region.y0 + (j + 0.5) * hy;
      for (int i = 0; i < mesh; ++i) {
        const double x = region.x0 + (i + 0.5) * hx;
        sum += green_h({x, y}, kappa);
      }
    }
    sum *= hx * hy;
    if (iter > 0 && std::abs(sum - prev) < 1e-6 * std::abs(sum)) return sum;
    prev = sum;
    mesh *= 2;
  }
  return prev;
}

}  // namespace sle
