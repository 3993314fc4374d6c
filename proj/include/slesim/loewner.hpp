#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slesim/driving.hpp"
#include "slesim/geometry.hpp"

namespace sle {

// State of one tracked point in slit-centered coordinates Z = g_t(z) - V_t,
// with the accumulated derivative modulus |g_t'(z)|.
struct FlowState {
  double zr = 0, zi = 0;
  double gprime = 1.0;
  bool alive = true;
  bool escaped = false;
  double swallow_time = 0;

  double upsilon() const { return zi / gprime; }
  double sine_arg() const { return zi / std::sqrt(zr * zr + zi * zi); }
  Cpx z() const { return {zr, zi}; }
};

// One exact vertical-slit step: Z -> sqrt(Z^2 + 2 a dt) - dv. Reports
// swallowing when the slit absorbs the point within the step (the sqrt
// argument crosses the branch cut). `t0` is the step's start time, used to
// stamp the swallow time at the step midpoint.
void flow_advance(FlowState& s, double dv, double dt, double a, double t0,
                  double escape_bound = 1e9);

struct SlitStepResult {
  Cpx z;
  bool swallowed = false;
};

// Elementary map applied to a single slit-centered point.
SlitStepResult slit_step(Cpx z, double dv, double dt, double a);

struct TrajectorySample {
  double t = 0;
  Cpx z;                  // Z_t = g_t(z) - V_t
  double upsilon = 0;     // Im g_t(z) / |g_t'(z)|
  double sine_arg = 0;    // sin arg Z_t
  double g_prime_abs = 1;
};

struct PointTrajectory {
  Cpx z0;
  std::vector<TrajectorySample> samples;
  std::optional<double> swallow_time;
  bool escaped = false;
};

struct EvolveOptions {
  std::size_t record_every = 1;   // keep every n-th grid sample
  double upsilon_floor = 0.0;     // stop recording once upsilon drops below
  double escape_bound = 1e9;      // abort when |Z| exceeds this
};

PointTrajectory evolve_point(const DrivingPath& driving, Cpx z, const EvolveOptions& opts = {});

// Curve points gamma(t_i) on the driving grid, in the closed upper half-plane.
struct Trace {
  double kappa = 0;
  double a = 0;
  std::vector<double> times;
  std::vector<Cpx> points;
  std::vector<std::uint8_t> degenerate;  // per-point flag: backward map lost Im

  std::size_t size() const { return points.size(); }
  std::size_t degenerate_count() const;
  Rect bounding_box() const;
};

struct TraceOptions {
  double offset_factor = 0.1;  // tip seed height = offset_factor * sqrt(local dt)
  int workers = 0;             // 0 = all available; 1 = serial reference
};

// Tip of the hull at index k, pulled back through the inverse elementary maps.
// `c2a[j]` holds 2*a*(t_j - t_{j-1}); degenerate is set when the composition
// lands on the real axis.
Cpx backward_tip(std::span<const double> values, std::span<const double> c2a, std::size_t k,
                 double offset, bool& degenerate);

// Serial and OpenMP tip kernels; both produce bit-identical output.
void trace_tips_serial(const DrivingPath& d, double offset_factor, std::span<Cpx> out,
                       std::span<std::uint8_t> degenerate);
void trace_tips_parallel(const DrivingPath& d, double offset_factor, std::span<Cpx> out,
                         std::span<std::uint8_t> degenerate, int workers);

Trace compute_trace(const DrivingPath& driving, const TraceOptions& opts = {});

// Coefficient of 1/z in the expansion of the composed map at infinity,
// estimated by probing a far point. Equals a * t for the capacity-time flow.
double capacity_coefficient(const DrivingPath& driving);

// Rescaled copy of a trace under gamma -> gamma/r, t -> t/r^2.
Trace rescale_trace(const Trace& tr, double r);

}  // namespace sle
