#pragma once

#include <cstdint>
#include <vector>

#include "slesim/driving.hpp"
#include "slesim/geometry.hpp"
#include "slesim/loewner.hpp"

namespace sle {

struct GreenParams {
  double kappa = 0;
  double a = 0;      // 2/kappa
  double d = 0;      // 1 + min(kappa/8, 1)

  static GreenParams for_kappa(double kappa);
};

// Chordal Green's function for SLE_kappa in the upper half-plane:
// G(z) = Im(z)^(d-2) * sin(arg z)^(4a-1).
double green_h(Cpx z, double kappa);

// Domain form G_D = Upsilon^(d-2) * S^(4a-1).
double green_general(double upsilon, double s, double kappa);

// Local martingale M_t(z) = |g_t'(z)|^(2-d) * G(Z_t(z)).
double local_mart(double g_prime_abs, Cpx z_centered, double kappa);

// Sample access with swallowing check: values exist only for t < T_z.
double local_mart(const PointTrajectory& traj, std::size_t sample_index, double kappa);

// c_* = 2 / int_0^pi sin^(4a) x dx, by adaptive Simpson quadrature (1e-10).
double c_star(double kappa);

struct GreenEstimate {
  Cpx z;
  double epsilon = 0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double p_hat = 0;
  double theory = 0;  // c_* eps^(2-d) G(z)
  double ratio = 0;
  double stderr_ = 0;  // Wilson half-width
};

struct StabilizeOptions {
  double quiet_rel = 1e-4;       // relative Upsilon change per unit capacity time
  double ball_factor = 10.0;     // hull must have left |z| * ball_factor
  double upsilon_floor_rel = 1e-6;
  double escape_bound = 1e9;
  double horizon_frac = 0.01;    // error when more than this fraction never settles
  int workers = 0;
};

// Limits Upsilon_{T_z-}(z) over n chordal replicas (replica ids
// cfg.replica .. cfg.replica+n-1). Swallowed points record ~0.
struct UpsilonLimits {
  std::vector<double> values;
  std::uint64_t unstabilized = 0;
};
UpsilonLimits upsilon_limits(Cpx z, std::uint64_t n, const SamplerConfig& cfg,
                             const StabilizeOptions& opts = {});

// One-point estimate P{Upsilon_inf(z) <= eps} against c_* eps^(2-d) G(z).
GreenEstimate green_hit_prob_mc(Cpx z, double epsilon, std::uint64_t n,
                                const SamplerConfig& cfg, const StabilizeOptions& opts = {});

GreenEstimate green_estimate_from_limits(Cpx z, double epsilon, const UpsilonLimits& lims,
                                         double kappa);

// Ensemble of M_{t ∧ tau_eps}(z) over chordal replicas, for martingale checks.
std::vector<double> stopped_local_mart(Cpx z, double tau_eps, double t_eval, std::uint64_t n,
                                       const SamplerConfig& cfg, int workers = 0);

// Boundary for harmonic-measure walks: tagged segments.
struct BoundarySet {
  struct Arc {
    Cpx a, b;
    std::uint32_t tag = 0;
  };
  std::vector<Arc> arcs;
  static BoundarySet half_plane(std::uint32_t neg_tag = 0, std::uint32_t pos_tag = 1,
                                double extent = 1e9);
};

struct WalkOptions {
  double band = 1e-4;
  double step_frac = 1.0 / 3.0;
  std::uint64_t max_steps = 2'000'000;
  std::uint64_t seed = 0xbada55;
  int workers = 0;
};

struct WalkEstimate {
  double p = 0;
  double stderr_ = 0;
  std::uint64_t n = 0;
};

// Fraction of distance-capped Brownian walkers from z that first exit through
// the arcs carrying `arc_tag`.
WalkEstimate harmonic_measure_mc(const BoundarySet& boundary, Cpx z, std::uint32_t arc_tag,
                                 std::uint64_t n, const WalkOptions& opts = {});

// Midpoint-rule integral of green_h over a rectangle in the open half-plane,
// refined until two successive refinements differ by < 1e-6 relative.
double integrate_green(const Rect& region, double kappa, int mesh0 = 16);

}  // namespace sle
