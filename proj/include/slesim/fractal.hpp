#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "slesim/driving.hpp"
#include "slesim/geometry.hpp"
#include "slesim/loewner.hpp"

namespace sle {

// Grid square [n1, n1+1] x [n2, n2+1] * l^(-k), translated by `offset`.
struct LadicSquare {
  int level = 0;
  std::int64_t n1 = 0, n2 = 0;
  int base = 16;
  Cpx offset;

  double side() const;
  Rect rect() const;
  LadicSquare ancestor(int level_up) const;  // containing square `level_up` levels coarser
  bool operator==(const LadicSquare& o) const {
    return level == o.level && n1 == o.n1 && n2 == o.n2 && base == o.base && offset == o.offset;
  }
};

// Estimated natural-parametrization mass per l-adic square, for levels
// level_min..level_max over the unit square at `offset`.
struct MeasureField {
  int base = 16;
  int level_min = 0, level_max = 0;
  Cpx offset;
  double d = 0;
  // per level: packed (n1 << 32 | n2) -> mass
  std::vector<std::unordered_map<std::uint64_t, double>> mass_by_level;

  double mass(const LadicSquare& sq) const;
  std::size_t nonzero_count(int level) const;
};

struct CoverParams {
  int base = 16;
  int m = 1, M = 3;
  double epsilon = 0.1;
  double d = 0;
  Cpx offset;
};

struct CoverReport {
  CoverParams params;
  std::vector<LadicSquare> big_squares;       // maximal big squares, levels m..M-1
  std::vector<LadicSquare> residual_squares;  // level-M squares not covered but occupied
  double y1 = 0;                              // sum over big squares of l^(-d k)
  double y2 = 0;                              // residual count * l^(-d M)
};

// eps^(d-2) * Area{ z in region : dist(z, polyline) <= eps }, on a grid of
// pitch eps/4 with exact point-to-segment distances.
double minkowski_mass(std::span<const Cpx> points, const Rect& region, double eps_mink,
                      double d, int workers = 0);

// Serial reference for the cell-marking kernel (count of covered cells).
std::uint64_t minkowski_cells_serial(std::span<const Cpx> points, const Rect& region,
                                     double eps_mink);
std::uint64_t minkowski_cells_parallel(std::span<const Cpx> points, const Rect& region,
                                       double eps_mink, int workers);

// Mass of every square at levels m..M inside the unit square at z0, with the
// sausage radius tied to each level (side/10).
MeasureField mu_field(const Trace& trace, int l, int m, int M, Cpx z0, double d,
                      int workers = 0);

// Level-`level` squares of the unit square at z0 that the trace meets, with
// exact segment clipping. Near the square the trace steps must not exceed
// max_step_frac * side (clipping is exact, but a coarse polyline misses the
// curve's excursions at sub-step scale).
std::vector<LadicSquare> occupancy(const Trace& trace, int l, int level, Cpx z0,
                                   double max_step_frac = 0.25);

CoverReport build_cover(const MeasureField& field, std::span<const LadicSquare> occupancy_m,
                        double epsilon);

// Upper bound on the Hausdorff pre-measure H^alpha at the l-adic scale k:
// sum over occupied squares of (sqrt(2) l^-k)^alpha. Squares are anchored at
// the trace's bounding-box origin.
double hausdorff_upper(const Trace& trace, double alpha, int scale_level, int l);

struct DimensionFit {
  std::vector<double> scales;
  std::vector<std::uint64_t> counts;
  double slope = 0;
  double r2 = 0;
};

// Box-counting dimension over levels k_min..k_max of side l^-k, restricted to
// `window` (default: the trace bounding box).
DimensionFit box_dimension(const Trace& trace, int l, int k_min, int k_max,
                           std::optional<Rect> window = std::nullopt);

struct BigSquareOptions {
  Cpx z_target{0.533203125, 2.533203125};  // center of a level-2 square of A + z0
  Cpx z0{-0.5, 2.0};
  double enlarge = 3.0;        // entry squares D* = enlarge x side (paper uses 100)
  double coarse_dt = 1e-3;
  double t_max = 12.0;
  int workers = 0;
};

struct BigSquareMasses {
  std::vector<double> masses;   // per accepted replica: window mass in D_k
  std::uint64_t total = 0;      // replicas simulated
  double threshold_unit = 0;    // l^(-d k), so threshold(eps) = threshold_unit / eps
};

// Inter-hitting natural mass samples for the level-k square of the chain
// through z_target, conditioned on the trace reaching the level-(k+1) square.
BigSquareMasses big_square_masses(const SamplerConfig& cfg, int k, int l, std::uint64_t n,
                                  double d, const BigSquareOptions& opts = {});

struct BigSquareProb {
  double q_hat = 0;
  double stderr_ = 0;
  std::uint64_t accepted = 0;
  std::uint64_t total = 0;
  double threshold = 0;
};

// q = P{ window mass < l^(-d k) / eps | level-(k+1) square reached }.
BigSquareProb big_square_prob_mc(const SamplerConfig& cfg, int k, double epsilon, int l,
                                 std::uint64_t n, const BigSquareOptions& opts = {});

BigSquareProb big_square_prob_from_masses(const BigSquareMasses& masses, double epsilon);

}  // namespace sle
