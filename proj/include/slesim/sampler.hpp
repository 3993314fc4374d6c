#pragma once

#include <cstdint>
#include <utility>

#include "slesim/driving.hpp"
#include "slesim/loewner.hpp"

namespace sle {

// Chordal SLE_kappa sample: Brownian driving plus the reconstructed trace.
std::pair<DrivingPath, Trace> sample_chordal(const SamplerConfig& cfg,
                                             const TraceOptions& topts = {});

struct RadialTarget {
  Cpx z;                  // marked interior point
  double stop_upsilon;    // run until Upsilon_t(z) <= stop_upsilon
  void validate() const;
};

struct TwoSidedResult {
  DrivingPath driving;
  Trace trace;
  bool reached = false;          // Upsilon hit stop_upsilon before t_max
  bool swallowed_early = false;  // numeric flow absorbed z first; sample is void
  double final_upsilon = 0;
  double final_time = 0;
};

// Drift coefficient of the two-sided radial driving SDE at slit-centered Z.
double two_sided_drift(Cpx z_centered, double kappa);

// Euler-Maruyama sample of two-sided radial SLE through target.z, with step
// shrinking proportional to Upsilon^2 once Upsilon < 2 * stop_upsilon.
TwoSidedResult sample_two_sided(const SamplerConfig& cfg, const RadialTarget& target,
                                const TraceOptions& topts = {});

// Brownian scaling: gamma -> gamma/r at time t/r^2, V -> V/r.
std::pair<DrivingPath, Trace> rescale(const DrivingPath& d, const Trace& tr, double r);

struct RefineOptions {
  double margin_factor = 3.0;    // capture band around a segment, in step lengths
  double pad_near = 0.05;        // region padding where target_step applies
  double pad_far = 0.5;          // outer padding with a relaxed target
  double far_step_factor = 4.0;
  std::size_t max_points = 2'000'000;
  int max_rounds = 48;
  int workers = 0;
};

struct RefinedSample {
  DrivingPath driving;
  Trace trace;
  int rounds = 0;
};

// Chordal sample whose trace is resolved to `target_step` inside `region`
// (with a graded relaxation just outside), obtained by Brownian-bridge
// subdivision of the driving wherever the current polyline is too coarse
// near the region. The flow itself stays one exact slit map per grid step.
RefinedSample sample_trace_refined(const SamplerConfig& cfg, const Rect& region,
                                   double target_step, const RefineOptions& opts = {});

}  // namespace sle
