#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slesim/error.hpp"

namespace sle {

struct SamplerConfig {
  double kappa = 8.0 / 3.0;
  double dt = 1e-3;     // capacity step of the base grid
  double t_max = 1.0;   // simulation horizon in capacity time
  std::uint64_t seed = 1;
  std::uint32_t replica = 0;

  double a() const { return 2.0 / kappa; }
  void validate() const;
};

// Sampled driving function V on a strictly increasing capacity-time grid,
// interpreted as piecewise constant over each step for the flow and
// piecewise linear for plotting/serialization.
struct DrivingPath {
  double kappa = 0;
  double a = 0;
  std::vector<double> times;
  std::vector<double> values;

  std::size_t step_count() const { return times.empty() ? 0 : times.size() - 1; }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  void validate() const;
};

// Brownian driving on a uniform grid; V(0) = 0, increments N(0, dt).
DrivingPath sample_chordal_driving(const SamplerConfig& cfg);

// Loewner scaling map: t -> t/r^2, V -> V/r.
DrivingPath rescale_driving(const DrivingPath& d, double r);

// Driving path that supports dyadic Brownian-bridge subdivision of individual
// grid intervals. Midpoint noise is addressed by (original step, dyadic node),
// so a given interval refines to the same values no matter when or in which
// order splits happen.
class RefinableDriving {
 public:
  explicit RefinableDriving(const SamplerConfig& cfg);

  const DrivingPath& path() const { return path_; }
  std::size_t interval_count() const { return path_.step_count(); }

  // Split each listed interval at its midpoint. Indices refer to the current
  // grid and may be unsorted; duplicates are ignored.
  void refine(std::span<const std::size_t> intervals);

  // Split every interval once (grid-wide halving).
  void refine_all();

  int depth_of(std::size_t interval) const { return nodes_[interval].depth; }

 private:
  struct Node {
    std::uint32_t orig;   // index of the base-grid step this came from
    std::uint32_t depth;  // dyadic depth below the base step
    std::uint32_t path;   // left/right choices, bit per level
  };
  double midpoint_noise(const Node& child) const;

  DrivingPath path_;
  std::vector<Node> nodes_;
  std::uint64_t seed_;
  std::uint32_t replica_;
};

}  // namespace sle
