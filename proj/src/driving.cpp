#include "slesim/driving.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/rng.hpp"

namespace sle {

void SamplerConfig::validate() const {
  require(kappa > 0.0 && kappa < 8.0, Errc::param, "kappa must lie in (0,8)");
  require(dt > 0.0, Errc::param, "dt must be positive");
  require(dt <= t_max, Errc::param, "dt must not exceed t_max");
}

void DrivingPath::validate() const {
  require(!times.empty(), Errc::param, "driving path is empty");
  require(times.size() == values.size(), Errc::param, "times/values size mismatch");
  require(times.front() == 0.0, Errc::param, "driving must start at t = 0");
  require(values.front() == 0.0, Errc::param, "driving must start at V = 0");
  require(kappa > 0.0, Errc::param, "kappa must be positive");
  require(std::abs(a * kappa - 2.0) <= 1e-12, Errc::param, "a * kappa must equal 2");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], Errc::param, "driving times must strictly increase");
}

DrivingPath sample_chordal_driving(const SamplerConfig& cfg) {
  cfg.validate();
  const std::size_t n = std::size_t(std::llround(cfg.t_max / cfg.dt));
  DrivingPath d;
  d.kappa = cfg.kappa;
  d.a = cfg.a();
  d.times.resize(n + 1);
  d.values.resize(n + 1);
  d.times[0] = 0.0;
  d.values[0] = 0.0;
  CounterRng rng(cfg.seed, cfg.replica, rng_stream::chordal);
  const double sd = std::sqrt(cfg.dt);
  for (std::size_t i = 1; i <= n; ++i) {
    d.times[i] = double(i) * cfg.dt;
    d.values[i] = d.values[i - 1] + sd * rng.gaussian();
  }
  return d;
}

DrivingPath rescale_driving(const DrivingPath& d, double r) {
  require(r > 0.0, Errc::param, "scale factor must be positive");
  DrivingPath out;
  out.kappa = d.kappa;
  out.a = d.a;
  out.times.resize(d.times.size());
  out.values.resize(d.values.size());
  const double inv_r = 1.0 / r;
  const double inv_r2 = inv_r * inv_r;
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    out.times[i] = d.times[i] * inv_r2;
    out.values[i] = d.values[i] * inv_r;
  }
  return out;
}

RefinableDriving::RefinableDriving(const SamplerConfig& cfg)
    : path_(sample_chordal_driving(cfg)), seed_(cfg.seed), replica_(cfg.replica) {
  nodes_.resize(path_.step_count());
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i] = {std::uint32_t(i), 0, 0};
}

double RefinableDriving::midpoint_noise(const Node& child) const {
  // one address per dyadic node: (orig step, depth, path)
  const std::uint64_t idx =
      (std::uint64_t(child.orig) << 32) | (std::uint64_t(child.depth) << 26) | child.path;
  return CounterRng::gaussian_at(seed_, replica_, rng_stream::bridge, idx);
}

void RefinableDriving::refine(std::span<const std::size_t> intervals) {
  if (intervals.empty()) return;
  std::vector<std::size_t> idx(intervals.begin(), intervals.end());
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  require(idx.back() < nodes_.size(), Errc::param, "refine interval out of range");

  const std::size_t old_n = nodes_.size();
  std::vector<double> times, values;
  std::vector<Node> nodes;
  times.reserve(old_n + idx.size() + 1);
  values.reserve(old_n + idx.size() + 1);
  nodes.reserve(old_n + idx.size());
  times.push_back(path_.times[0]);
  values.push_back(path_.values[0]);

  std::size_t next_split = 0;
  for (std::size_t i = 0; i < old_n; ++i) {
    const bool split = next_split < idx.size() && idx[next_split] == i;
    if (split) ++next_split;
    if (!split) {
      nodes.push_back(nodes_[i]);
      times.push_back(path_.times[i + 1]);
      values.push_back(path_.values[i + 1]);
      continue;
    }
    const Node& nd = nodes_[i];
    require(nd.depth < 26, Errc::resolution, "bridge refinement exceeded maximum depth");
    Node left{nd.orig, nd.depth + 1, nd.path};
    Node right{nd.orig, nd.depth + 1, nd.path | (1u << nd.depth)};
    const double t0 = path_.times[i], t1 = path_.times[i + 1];
    const double v0 = path_.values[i], v1 = path_.values[i + 1];
    const double tm = 0.5 * (t0 + t1);
    const double vm = 0.5 * (v0 + v1) + 0.5 * std::sqrt(t1 - t0) * midpoint_noise(left);
    nodes.push_back(left);
    times.push_back(tm);
    values.push_back(vm);
    nodes.push_back(right);
    times.push_back(t1);
    values.push_back(v1);
  }
  path_.times = std::move(times);
  path_.values = std::move(values);
  nodes_ = std::move(nodes);
}

void RefinableDriving::refine_all() {
  std::vector<std::size_t> all(nodes_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  refine(all);
}

}  // namespace sle
