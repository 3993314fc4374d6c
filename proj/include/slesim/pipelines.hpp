#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slesim/fractal.hpp"
#include "slesim/hcap.hpp"
#include "slesim/observables.hpp"
#include "slesim/sampler.hpp"

namespace sle {

// Experiment drivers shared by the CLI and the acceptance suite.

struct GreenVerifyParams {
  double kappa = 2.0;
  Cpx z{0.0, 1.0};
  std::vector<double> eps{0.2, 0.1, 0.05};
  std::uint64_t n = 20000;
  double dt = 2e-4;
  double t_max = 0;  // 0: derived from the stabilization ball
  std::uint64_t seed = 1;
  int workers = 0;
};

struct GreenVerifyResult {
  std::vector<GreenEstimate> estimates;
  std::uint64_t unstabilized = 0;
};

GreenVerifyResult run_green_verify(const GreenVerifyParams& p);

struct DimensionParams {
  double kappa = 2.0;
  int l = 2;
  int k_min = 2, k_max = 8;
  int traces = 1;
  double dt = 5e-4;       // coarse grid
  double t_max = 6.0;
  std::uint64_t seed = 1;
  double window_height = 1.2;  // center the window at the first tip this high
  double window_side = 1.6;
  int workers = 0;
};

struct DimensionResult {
  std::vector<DimensionFit> per_trace;
  std::vector<double> scales;       // pooled levels
  std::vector<double> mean_counts;  // mean occupied boxes per level
  double slope = 0;                 // fit of the pooled counts
  double r2 = 0;
  int traces_used = 0;
};

DimensionResult run_dimension(const DimensionParams& p);

struct NaturalMeasureParams {
  double kappa = 8.0 / 3.0;
  int l = 16;
  int m = 1;
  int traces = 400;
  double dt = 2e-3;
  double t_max = 12.0;
  std::uint64_t seed = 1;
  Cpx z0{-0.5, 2.0};
  // level-m squares to compare; defaults to four central bottom squares
  std::vector<std::pair<std::int64_t, std::int64_t>> squares;
  int workers = 0;
};

struct NaturalMeasureResult {
  struct SquareStat {
    LadicSquare square;
    double mean_mass = 0;
    double stderr_ = 0;
    double green_integral = 0;
    double ratio = 0;  // mean_mass / green_integral
  };
  std::vector<SquareStat> squares;
  double ratio_spread = 0;  // max relative deviation from the mean ratio
};

NaturalMeasureResult run_natural_measure(const NaturalMeasureParams& p);

struct CoverRunParams {
  double kappa = 8.0 / 3.0;
  int l = 16;
  int m = 1, M = 3;
  std::vector<double> eps{0.5, 0.1, 0.02};
  int replicas = 50;
  double dt = 2e-3;
  double t_max = 10.0;
  std::uint64_t seed = 1;
  Cpx z0{-0.5, 2.0};
  int workers = 0;
};

struct CoverRunResult {
  struct PerEps {
    double epsilon = 0;
    double mean_y1 = 0, mean_y2 = 0;
    double mean_sum = 0, stderr_sum = 0;
  };
  std::vector<PerEps> per_eps;
  // per replica x per eps: (y1, y2)
  std::vector<std::vector<std::pair<double, double>>> table;
  int replicas_hit = 0;  // replicas whose trace meets the square
};

CoverRunResult run_cover(const CoverRunParams& p);

struct HcapCheckParams {
  double kappa = 8.0 / 3.0;
  double t = 1.0;
  std::uint64_t walkers = 100000;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct HcapCheckResult {
  HcapEstimate estimate;
  double expected = 0;  // a * t
};

HcapCheckResult run_hcap_check(const HcapCheckParams& p);

// Chordal sample refined to `target_step` around the unit square at z0.
RefinedSample sample_near_unit_square(const SamplerConfig& cfg, Cpx z0, double target_step,
                                      int workers);

// Chordal sample refined inside a window centered at the first tip reaching
// `window_height`; nullopt when the coarse trace never gets there.
struct WindowedTrace {
  Trace trace;
  Rect window;
};
std::optional<WindowedTrace> sample_window_trace(const SamplerConfig& cfg, double window_height,
                                                 double window_side, double target_step,
                                                 int workers);

}  // namespace sle
