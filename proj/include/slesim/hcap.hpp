#pragma once

#include <cstdint>

#include "slesim/loewner.hpp"

namespace sle {

struct HcapOptions {
  double y0 = 0.0;           // walk launch height; 0 = y0_factor * hull radius
  double y0_factor = 100.0;
  double band = 1e-6;        // absorption band on the hull
  double step_frac = 1.0 / 3.0;  // gaussian step sigma = step_frac * distance
  std::uint64_t max_steps = 5'000'000;
  std::uint64_t seed = 0x5ca1ab1e;
  int workers = 0;
};

struct HcapEstimate {
  double value = 0;
  double stderr_ = 0;
  double y0 = 0;
  std::uint64_t walkers = 0;
  std::uint64_t hull_hits = 0;
};

// Monte-Carlo half-plane capacity of the hull traced up to capacity time t:
// hcap = lim_y y E^{iy}[Im B_tau], sampled with distance-capped gaussian
// walks absorbed on the real axis or the trace polyline.
HcapEstimate hcap_mc(const Trace& trace, double t, std::uint64_t n_walkers,
                     const HcapOptions& opts = {});

// Same estimator on an explicit boundary polyline (no trace bookkeeping).
HcapEstimate hcap_mc_polyline(std::span<const Cpx> hull, std::uint64_t n_walkers,
                              const HcapOptions& opts = {});

}  // namespace sle
