#include "slesim/pipelines.hpp"

#include <algorithm>
#include <cmath>

#include "slesim/parallel.hpp"
#include "slesim/stats.hpp"

namespace sle {

GreenVerifyResult run_green_verify(const GreenVerifyParams& p) {
  require(!p.eps.empty(), Errc::param, "need at least one epsilon");
  SamplerConfig cfg;
  cfg.kappa = p.kappa;
  cfg.dt = p.dt;
  cfg.seed = p.seed;
  const double a = cfg.a();
  const double zmod = std::abs(p.z);
  StabilizeOptions sopts;
  sopts.workers = p.workers;
  const double t_ball = (sopts.ball_factor * zmod) * (sopts.ball_factor * zmod) / (2.0 * a);
  cfg.t_max = p.t_max > 0 ? p.t_max : t_ball + 8.0;

  const UpsilonLimits lims = upsilon_limits(p.z, p.n, cfg, sopts);
  if (double(lims.unstabilized) > sopts.horizon_frac * double(p.n))
    fail(Errc::horizon, "too many replicas without a stabilized Upsilon at t_max");

  GreenVerifyResult out;
  out.unstabilized = lims.unstabilized;
  for (double eps : p.eps)
    out.estimates.push_back(green_estimate_from_limits(p.z, eps, lims, p.kappa));
  return out;
}

std::optional<WindowedTrace> sample_window_trace(const SamplerConfig& cfg, double window_height,
                                                 double window_side, double target_step,
                                                 int workers) {
  // coarse pass to locate the window
  const auto [coarse_driving, coarse] = sample_chordal(cfg, TraceOptions{0.1, workers});
  std::optional<Cpx> center;
  for (const Cpx& g : coarse.points) {
    if (g.imag() >= window_height) {
      center = g;
      break;
    }
  }
  if (!center) return std::nullopt;
  const Rect window = Rect::square(*center, window_side);

  RefineOptions ropts;
  ropts.workers = workers;
  ropts.pad_near = 0.02 * window_side;
  ropts.pad_far = 0.25 * window_side;
  RefinedSample rs = sample_trace_refined(cfg, window, target_step, ropts);
  return WindowedTrace{std::move(rs.trace), window};
}

DimensionResult run_dimension(const DimensionParams& p) {
  require(p.traces >= 1, Errc::param, "need at least one trace");
  DimensionResult out;
  const double side_min = std::pow(double(p.l), -double(p.k_max));
  const double target = side_min / 4.0;

  std::vector<std::vector<std::uint64_t>> counts;
  for (int t = 0; t < p.traces; ++t) {
    SamplerConfig cfg;
    cfg.kappa = p.kappa;
    cfg.dt = p.dt;
    cfg.t_max = p.t_max;
    cfg.seed = p.seed;
    cfg.replica = std::uint32_t(t);
    auto wt = sample_window_trace(cfg, p.window_height, p.window_side, target, p.workers);
    if (!wt) continue;
    DimensionFit fit = box_dimension(wt->trace, p.l, p.k_min, p.k_max, wt->window);
    counts.push_back(fit.counts);
    if (out.scales.empty()) out.scales = fit.scales;
    out.per_trace.push_back(std::move(fit));
  }
  require(!counts.empty(), Errc::starved, "no trace reached the window height");
  out.traces_used = int(counts.size());

  out.mean_counts.assign(out.scales.size(), 0.0);
  for (const auto& c : counts)
    for (std::size_t k = 0; k < c.size(); ++k) out.mean_counts[k] += double(c[k]);
  for (double& v : out.mean_counts) v /= double(counts.size());

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < out.scales.size(); ++k) {
    xs.push_back(std::log(1.0 / out.scales[k]));
    ys.push_back(std::log(out.mean_counts[k]));
  }
  const LinFit lf = linear_fit(xs, ys);
  out.slope = lf.slope;
  out.r2 = lf.r2;
  return out;
}

RefinedSample sample_near_unit_square(const SamplerConfig& cfg, Cpx z0, double target_step,
                                      int workers) {
  const Rect region{z0.real(), z0.imag(), z0.real() + 1.0, z0.imag() + 1.0};
  RefineOptions ropts;
  ropts.workers = workers;
  ropts.pad_near = 0.02;
  ropts.pad_far = 0.3;
  return sample_trace_refined(cfg, region, target_step, ropts);
}

NaturalMeasureResult run_natural_measure(const NaturalMeasureParams& p) {
  require(p.traces >= 1, Errc::param, "need at least one trace");
  const GreenParams gp = GreenParams::for_kappa(p.kappa);
  auto squares = p.squares;
  if (squares.empty()) {
    const std::int64_t c = p.l / 2;
    squares = {{c - 2, 0}, {c - 1, 0}, {c, 0}, {c + 1, 0}};
  }

  const double side = std::pow(double(p.l), -double(p.m));
  const double target = side / 10.0;

  std::vector<std::vector<double>> mass(squares.size());
  for (auto& v : mass) v.assign(std::size_t(p.traces), 0.0);

#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(p.workers))
  for (int t = 0; t < p.traces; ++t) {
    SamplerConfig cfg;
    cfg.kappa = p.kappa;
    cfg.dt = p.dt;
    cfg.t_max = p.t_max;
    cfg.seed = p.seed;
    cfg.replica = std::uint32_t(t);
    const RefinedSample rs = sample_near_unit_square(cfg, p.z0, target, 1);
    const MeasureField field = mu_field(rs.trace, p.l, p.m, p.m, p.z0, gp.d, 1);
    for (std::size_t s = 0; s < squares.size(); ++s) {
      const LadicSquare sq{p.m, squares[s].first, squares[s].second, p.l, p.z0};
      mass[s][std::size_t(t)] = field.mass(sq);
    }
  }

  NaturalMeasureResult out;
  double ratio_sum = 0;
  for (std::size_t s = 0; s < squares.size(); ++s) {
    NaturalMeasureResult::SquareStat st;
    st.square = LadicSquare{p.m, squares[s].first, squares[s].second, p.l, p.z0};
    const MeanStderr ms = mean_stderr(mass[s]);
    st.mean_mass = ms.mean;
    st.stderr_ = ms.stderr_;
    st.green_integral = integrate_green(st.square.rect(), p.kappa);
    st.ratio = st.green_integral > 0 ? st.mean_mass / st.green_integral : 0.0;
    ratio_sum += st.ratio;
    out.squares.push_back(st);
  }
  const double ratio_mean = ratio_sum / double(out.squares.size());
  for (const auto& st : out.squares)
    out.ratio_spread =
        std::max(out.ratio_spread, std::abs(st.ratio - ratio_mean) / std::abs(ratio_mean));
  return out;
}

CoverRunResult run_cover(const CoverRunParams& p) {
  require(p.replicas >= 1, Errc::param, "need at least one replica");
  require(p.m >= 0 && p.m < p.M, Errc::param, "need 0 <= m < M");
  require(!p.eps.empty(), Errc::param, "need at least one epsilon");
  const GreenParams gp = GreenParams::for_kappa(p.kappa);

  const double side_M = std::pow(double(p.l), -double(p.M));
  const double side_big = std::pow(double(p.l), -double(p.M - 1));
  // resolve to half the residual-square side; mass levels need side/10
  const double target = std::min(side_M / 2.0, side_big / 10.0);

  CoverRunResult out;
  out.table.assign(std::size_t(p.replicas), {});
  std::vector<std::uint8_t> hit(std::size_t(p.replicas), 0);

#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(p.workers))
  for (int r = 0; r < p.replicas; ++r) {
    SamplerConfig cfg;
    cfg.kappa = p.kappa;
    cfg.dt = p.dt;
    cfg.t_max = p.t_max;
    cfg.seed = p.seed;
    cfg.replica = std::uint32_t(r);
    const RefinedSample rs = sample_near_unit_square(cfg, p.z0, target, 1);
    const MeasureField field = mu_field(rs.trace, p.l, p.m, p.M - 1, p.z0, gp.d, 1);
    const std::vector<LadicSquare> occ = occupancy(rs.trace, p.l, p.M, p.z0, 0.5);
    hit[std::size_t(r)] = occ.empty() ? 0 : 1;
    auto& row = out.table[std::size_t(r)];
    row.reserve(p.eps.size());
    for (double eps : p.eps) {
      const CoverReport rep = build_cover(field, occ, eps);
      row.emplace_back(rep.y1, rep.y2);
    }
  }

  for (std::size_t e = 0; e < p.eps.size(); ++e) {
    CoverRunResult::PerEps pe;
    pe.epsilon = p.eps[e];
    std::vector<double> sums(std::size_t(p.replicas));
    for (int r = 0; r < p.replicas; ++r) {
      pe.mean_y1 += out.table[std::size_t(r)][e].first;
      pe.mean_y2 += out.table[std::size_t(r)][e].second;
      sums[std::size_t(r)] = out.table[std::size_t(r)][e].first + out.table[std::size_t(r)][e].second;
    }
    pe.mean_y1 /= double(p.replicas);
    pe.mean_y2 /= double(p.replicas);
    const MeanStderr ms = mean_stderr(sums);
    pe.mean_sum = ms.mean;
    pe.stderr_sum = ms.stderr_;
    out.per_eps.push_back(pe);
  }
  for (auto h : hit) out.replicas_hit += h;
  return out;
}

HcapCheckResult run_hcap_check(const HcapCheckParams& p) {
  SamplerConfig cfg;
  cfg.kappa = p.kappa;
  cfg.dt = p.dt;
  cfg.t_max = p.t;
  cfg.seed = p.seed;
  const auto [driving, trace] = sample_chordal(cfg, TraceOptions{0.1, p.workers});
  HcapOptions hopts;
  hopts.workers = p.workers;
  hopts.seed = p.seed ^ 0x9e3779b97f4a7c15ull;
  HcapCheckResult out;
  out.estimate = hcap_mc(trace, p.t, p.walkers, hopts);
  out.expected = cfg.a() * p.t;
  return out;
}

}  // namespace sle
