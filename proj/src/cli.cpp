#include "slesim/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "slesim/pipelines.hpp"
#include "slesim/report.hpp"
#include "slesim/trace_io.hpp"

namespace sle {

namespace {

namespace fs = std::filesystem;

// kappa accepts plain decimals and fractions like 8/3
double parse_kappa(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_double(s);
  const double num = parse_double(s.substr(0, slash));
  const double den = parse_double(s.substr(slash + 1));
  require(den != 0.0, Errc::param, "kappa fraction with zero denominator");
  return num / den;
}

// complex accepts "a+bi", "a-bi", "bi", "a"
Cpx parse_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  require(!s.empty(), Errc::param, "empty complex literal");
  if (s.back() == 'i' || s.back() == 'I') {
    s.pop_back();
    // split at the last +/- that is not an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) {
      if (s.empty() || s == "+") return {0.0, 1.0};
      if (s == "-") return {0.0, -1.0};
      return {0.0, parse_double(s)};
    }
    const std::string re = s.substr(0, split);
    std::string im = s.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return {parse_double(re), parse_double(im)};
  }
  return {parse_double(s), 0.0};
}

struct CommonOpts {
  std::string out_dir;
  int workers = 0;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  const char* env_out = std::getenv("SLESIM_OUT");
  c.out_dir = env_out ? env_out : "slesim-out";
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--workers", c.workers, "worker threads (0 = all)");
  cmd->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp comment in SVG output");
}

fs::path prepare_out(const CommonOpts& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream os(dir / "manifest.txt");
  os << "command " << command << '\n';
  for (const auto& [k, v] : kv) os << k << ' ' << v << '\n';
}

int cmd_sample(const std::string& kappa_s, double dt, double t_max, std::uint64_t seed,
               int replicas, const CommonOpts& common) {
  const double kappa = parse_kappa(kappa_s);
  const fs::path dir = prepare_out(common);
  std::vector<std::string> files;
  for (int r = 0; r < replicas; ++r) {
    SamplerConfig cfg;
    cfg.kappa = kappa;
    cfg.dt = dt;
    cfg.t_max = t_max;
    cfg.seed = seed;
    cfg.replica = std::uint32_t(r);
    const auto [driving, trace] = sample_chordal(cfg, TraceOptions{0.1, common.workers});
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%04d.tsv", r);
    TraceFileMeta meta{1, kappa, cfg.a(), dt, t_max, seed, std::uint32_t(r)};
    write_trace(dir / name, driving, trace, meta);
    files.push_back(name);
  }
  std::vector<std::pair<std::string, std::string>> kv = {
      {"kappa", fmt_double(kappa)}, {"dt", fmt_double(dt)},    {"t_max", fmt_double(t_max)},
      {"seed", std::to_string(seed)}, {"replicas", std::to_string(replicas)},
      {"workers", std::to_string(common.workers)}};
  for (std::size_t i = 0; i < files.size(); ++i) kv.emplace_back("trace_file", files[i]);
  write_manifest(dir, "sample", kv);
  return 0;
}

int cmd_green_verify(const std::string& kappa_s, const std::string& z_s,
                     std::vector<double> eps, std::uint64_t n, double dt, double t_max,
                     std::uint64_t seed, const CommonOpts& common) {
  GreenVerifyParams p;
  p.kappa = parse_kappa(kappa_s);
  p.z = parse_complex(z_s);
  p.eps = std::move(eps);
  p.n = n;
  p.dt = dt;
  p.t_max = t_max;
  p.seed = seed;
  p.workers = common.workers;
  const GreenVerifyResult res = run_green_verify(p);

  const fs::path dir = prepare_out(common);
  CsvTable table;
  table.columns = {"z_re", "z_im", "kappa", "epsilon", "n", "hits", "p_hat", "theory", "ratio",
                   "stderr"};
  for (const GreenEstimate& e : res.estimates)
    table.rows.push_back({e.z.real(), e.z.imag(), p.kappa, e.epsilon, double(e.n),
                          double(e.hits), e.p_hat, e.theory, e.ratio, e.stderr_});
  write_csv(dir / "green.csv", table,
            {"tracked point, real part", "tracked point, imaginary part", "SLE parameter",
             "conformal-radius threshold", "replicas", "replicas with Upsilon <= eps",
             "hit fraction", "c* eps^(2-d) G(z)", "p_hat / theory", "Wilson half-width"});

  SvgPlot plot;
  plot.title = "one-point estimate: ratio to theory";
  plot.xlabel = "epsilon";
  plot.ylabel = "p_hat / theory";
  plot.timestamp = !common.no_timestamp;
  SvgSeries s;
  for (const GreenEstimate& e : res.estimates) {
    s.x.push_back(e.epsilon);
    s.y.push_back(e.ratio);
  }
  plot.series.push_back(s);
  write_svg_plot(dir / "green_ratio.svg", plot);

  write_manifest(dir, "green-verify",
                 {{"kappa", fmt_double(p.kappa)},
                  {"z", z_s},
                  {"n", std::to_string(n)},
                  {"dt", fmt_double(dt)},
                  {"t_max", fmt_double(t_max)},
                  {"seed", std::to_string(seed)},
                  {"workers", std::to_string(common.workers)}});
  return 0;
}

int cmd_dimension(const std::string& kappa_s, int l, int k_min, int k_max, int traces, double dt,
                  double t_max, std::uint64_t seed, const CommonOpts& common) {
  DimensionParams p;
  p.kappa = parse_kappa(kappa_s);
  p.l = l;
  p.k_min = k_min;
  p.k_max = k_max;
  p.traces = traces;
  p.dt = dt;
  p.t_max = t_max;
  p.seed = seed;
  p.workers = common.workers;
  const DimensionResult res = run_dimension(p);

  const fs::path dir = prepare_out(common);
  CsvTable table;
  table.columns = {"scale", "mean_count"};
  for (std::size_t k = 0; k < res.scales.size(); ++k)
    table.rows.push_back({res.scales[k], res.mean_counts[k]});
  write_csv(dir / "dimension.csv", table,
            {"box side", "occupied boxes, mean over traces"});

  CsvTable fitcsv;
  fitcsv.columns = {"kappa", "slope", "r2", "traces"};
  fitcsv.rows.push_back({p.kappa, res.slope, res.r2, double(res.traces_used)});
  write_csv(dir / "dimension_fit.csv", fitcsv,
            {"SLE parameter", "box-counting slope", "fit r^2", "traces used"});

  SvgPlot plot;
  plot.title = "box-counting dimension";
  plot.xlabel = "1/side";
  plot.ylabel = "boxes";
  plot.logx = true;
  plot.logy = true;
  plot.timestamp = !common.no_timestamp;
  SvgSeries s;
  s.points_only = true;
  for (std::size_t k = 0; k < res.scales.size(); ++k) {
    s.x.push_back(1.0 / res.scales[k]);
    s.y.push_back(res.mean_counts[k]);
  }
  plot.series.push_back(s);
  // log10 coordinates: slope carries over, intercept from the first point
  if (!res.scales.empty()) {
    const double x0 = std::log10(1.0 / res.scales[0]);
    const double y0 = std::log10(res.mean_counts[0]);
    plot.fit_line = {{res.slope, y0 - res.slope * x0}};
    char ann[64];
    std::snprintf(ann, sizeof(ann), "slope %.3f, r2 %.4f", res.slope, res.r2);
    plot.annotation = ann;
  }
  write_svg_plot(dir / "dimension.svg", plot);

  write_manifest(dir, "dimension",
                 {{"kappa", fmt_double(p.kappa)},
                  {"l", std::to_string(l)},
                  {"k_min", std::to_string(k_min)},
                  {"k_max", std::to_string(k_max)},
                  {"traces", std::to_string(traces)},
                  {"dt", fmt_double(dt)},
                  {"t_max", fmt_double(t_max)},
                  {"seed", std::to_string(seed)},
                  {"workers", std::to_string(common.workers)}});
  return 0;
}

int cmd_natural_measure(const std::string& kappa_s, int l, int m, int traces, double dt,
                        double t_max, std::uint64_t seed, const CommonOpts& common) {
  NaturalMeasureParams p;
  p.kappa = parse_kappa(kappa_s);
  p.l = l;
  p.m = m;
  p.traces = traces;
  p.dt = dt;
  p.t_max = t_max;
  p.seed = seed;
  p.workers = common.workers;
  const NaturalMeasureResult res = run_natural_measure(p);

  const fs::path dir = prepare_out(common);
  CsvTable table;
  table.columns = {"level", "n1", "n2", "mean_mass", "stderr", "green_integral", "ratio"};
  for (const auto& st : res.squares)
    table.rows.push_back({double(st.square.level), double(st.square.n1), double(st.square.n2),
                          st.mean_mass, st.stderr_, st.green_integral, st.ratio});
  write_csv(dir / "natural_measure.csv", table,
            {"l-adic level", "square x index", "square y index",
             "mean Minkowski-proxy mass over traces", "standard error of the mean",
             "integral of G over the square", "mean_mass / green_integral"});

  write_manifest(dir, "natural-measure",
                 {{"kappa", fmt_double(p.kappa)},
                  {"l", std::to_string(l)},
                  {"m", std::to_string(m)},
                  {"traces", std::to_string(traces)},
                  {"dt", fmt_double(dt)},
                  {"t_max", fmt_double(t_max)},
                  {"seed", std::to_string(seed)},
                  {"ratio_spread", fmt_double(res.ratio_spread)},
                  {"workers", std::to_string(common.workers)}});
  return 0;
}

int cmd_cover(const std::string& kappa_s, int l, int m, int M, std::vector<double> eps,
              int replicas, double dt, double t_max, std::uint64_t seed,
              const CommonOpts& common) {
  CoverRunParams p;
  p.kappa = parse_kappa(kappa_s);
  p.l = l;
  p.m = m;
  p.M = M;
  p.eps = std::move(eps);
  p.replicas = replicas;
  p.dt = dt;
  p.t_max = t_max;
  p.seed = seed;
  p.workers = common.workers;
  const CoverRunResult res = run_cover(p);

  const fs::path dir = prepare_out(common);
  CsvTable table;
  table.columns = {"epsilon", "mean_y1", "mean_y2", "mean_sum", "stderr_sum"};
  for (const auto& pe : res.per_eps)
    table.rows.push_back({pe.epsilon, pe.mean_y1, pe.mean_y2, pe.mean_sum, pe.stderr_sum});
  write_csv(dir / "cover.csv", table,
            {"big-square threshold parameter", "mean big-square weight Y1",
             "mean residual weight Y2", "mean Y1+Y2", "standard error of Y1+Y2"});

  SvgPlot plot;
  plot.title = "cover weight vs epsilon";
  plot.xlabel = "epsilon";
  plot.ylabel = "mean Y1+Y2";
  plot.logx = true;
  plot.timestamp = !common.no_timestamp;
  SvgSeries s;
  for (const auto& pe : res.per_eps) {
    s.x.push_back(pe.epsilon);
    s.y.push_back(pe.mean_sum);
  }
  plot.series.push_back(s);
  write_svg_plot(dir / "cover.svg", plot);

  write_manifest(dir, "cover",
                 {{"kappa", fmt_double(p.kappa)},
                  {"l", std::to_string(l)},
                  {"m", std::to_string(m)},
                  {"M", std::to_string(M)},
                  {"replicas", std::to_string(replicas)},
                  {"replicas_hit", std::to_string(res.replicas_hit)},
                  {"dt", fmt_double(dt)},
                  {"t_max", fmt_double(t_max)},
                  {"seed", std::to_string(seed)},
                  {"workers", std::to_string(common.workers)}});
  return 0;
}

int cmd_hcap_check(const std::string& kappa_s, double t, std::uint64_t walkers, double dt,
                   std::uint64_t seed, const CommonOpts& common) {
  HcapCheckParams p;
  p.kappa = parse_kappa(kappa_s);
  p.t = t;
  p.walkers = walkers;
  p.dt = dt;
  p.seed = seed;
  p.workers = common.workers;
  const HcapCheckResult res = run_hcap_check(p);

  const fs::path dir = prepare_out(common);
  CsvTable table;
  table.columns = {"kappa", "t", "walkers", "estimate", "stderr", "expected"};
  table.rows.push_back({p.kappa, p.t, double(p.walkers), res.estimate.value,
                        res.estimate.stderr_, res.expected});
  write_csv(dir / "hcap.csv", table,
            {"SLE parameter", "capacity time", "walker count", "Monte-Carlo hcap",
             "standard error", "a * t"});
  write_manifest(dir, "hcap-check",
                 {{"kappa", fmt_double(p.kappa)},
                  {"t", fmt_double(t)},
                  {"walkers", std::to_string(walkers)},
                  {"dt", fmt_double(dt)},
                  {"seed", std::to_string(seed)},
                  {"estimate", fmt_double(res.estimate.value)},
                  {"stderr", fmt_double(res.estimate.stderr_)},
                  {"workers", std::to_string(common.workers)}});
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"chordal SLE simulation and measurement toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; command-line flags win");
  app.allow_config_extras(false);

  // sample
  auto* sample = app.add_subcommand("sample", "sample chordal SLE traces to files");
  std::string s_kappa = "8/3";
  double s_dt = 1e-3, s_tmax = 1.0;
  std::uint64_t s_seed = 1;
  int s_replicas = 1;
  CommonOpts s_common;
  sample->add_option("--kappa", s_kappa, "SLE parameter (decimal or fraction)");
  sample->add_option("--dt", s_dt, "capacity step");
  sample->add_option("--t-max", s_tmax, "horizon");
  sample->add_option("--seed", s_seed, "master seed");
  sample->add_option("--replicas", s_replicas, "number of traces");
  add_common(sample, s_common);

  // green-verify
  auto* green = app.add_subcommand("green-verify", "one-point Green's function check");
  std::string g_kappa = "2", g_z = "0+1i";
  std::vector<double> g_eps{0.2, 0.1, 0.05};
  std::uint64_t g_n = 20000, g_seed = 1;
  double g_dt = 2e-4, g_tmax = 0;
  CommonOpts g_common;
  green->add_option("--kappa", g_kappa, "SLE parameter");
  green->add_option("--z", g_z, "tracked point, e.g. 0+1i");
  green->add_option("--eps", g_eps, "thresholds")->delimiter(',');
  green->add_option("--n", g_n, "replicas");
  green->add_option("--dt", g_dt, "capacity step");
  green->add_option("--t-max", g_tmax, "horizon (0 = auto)");
  green->add_option("--seed", g_seed, "master seed");
  add_common(green, g_common);

  // dimension
  auto* dim = app.add_subcommand("dimension", "box-counting dimension of sampled traces");
  std::string d_kappa = "2";
  int d_l = 2, d_kmin = 2, d_kmax = 8, d_traces = 4;
  double d_dt = 5e-4, d_tmax = 6.0;
  std::uint64_t d_seed = 1;
  CommonOpts d_common;
  dim->add_option("--kappa", d_kappa, "SLE parameter");
  dim->add_option("--l", d_l, "grid base");
  dim->add_option("--k-min", d_kmin, "coarsest level");
  dim->add_option("--k-max", d_kmax, "finest level");
  dim->add_option("--traces", d_traces, "number of traces");
  dim->add_option("--dt", d_dt, "coarse capacity step");
  dim->add_option("--t-max", d_tmax, "horizon");
  dim->add_option("--seed", d_seed, "master seed");
  add_common(dim, d_common);

  // natural-measure
  auto* nat = app.add_subcommand("natural-measure", "natural-parametrization mass vs Green integral");
  std::string n_kappa = "8/3";
  int n_l = 16, n_m = 1, n_traces = 400;
  double n_dt = 2e-3, n_tmax = 12.0;
  std::uint64_t n_seed = 1;
  CommonOpts n_common;
  nat->add_option("--kappa", n_kappa, "SLE parameter");
  nat->add_option("--l", n_l, "grid base");
  nat->add_option("--m", n_m, "square level");
  nat->add_option("--traces", n_traces, "number of traces");
  nat->add_option("--dt", n_dt, "coarse capacity step");
  nat->add_option("--t-max", n_tmax, "horizon");
  nat->add_option("--seed", n_seed, "master seed");
  add_common(nat, n_common);

  // cover
  auto* cover = app.add_subcommand("cover", "l-adic big-square covers and Y statistics");
  std::string c_kappa = "8/3";
  int c_l = 16, c_m = 1, c_M = 3, c_replicas = 50;
  std::vector<double> c_eps{0.5, 0.1, 0.02};
  double c_dt = 2e-3, c_tmax = 10.0;
  std::uint64_t c_seed = 1;
  CommonOpts c_common;
  cover->add_option("--kappa", c_kappa, "SLE parameter");
  cover->add_option("--l", c_l, "grid base");
  cover->add_option("--m", c_m, "coarsest big-square level");
  cover->add_option("--M", c_M, "residual level");
  cover->add_option("--eps", c_eps, "threshold parameters")->delimiter(',');
  cover->add_option("--replicas", c_replicas, "number of traces");
  cover->add_option("--dt", c_dt, "coarse capacity step");
  cover->add_option("--t-max", c_tmax, "horizon");
  cover->add_option("--seed", c_seed, "master seed");
  add_common(cover, c_common);

  // hcap-check
  auto* hc = app.add_subcommand("hcap-check", "Monte-Carlo half-plane capacity vs a*t");
  std::string h_kappa = "8/3";
  double h_t = 1.0, h_dt = 1e-4;
  std::uint64_t h_walkers = 100000, h_seed = 1;
  CommonOpts h_common;
  hc->add_option("--kappa", h_kappa, "SLE parameter");
  hc->add_option("--t", h_t, "capacity time");
  hc->add_option("--walkers", h_walkers, "walker count");
  hc->add_option("--dt", h_dt, "capacity step");
  hc->add_option("--seed", h_seed, "master seed");
  add_common(hc, h_common);

  // CLI11 wants argv-style reversed vector
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      (void)app.exit(e);
      return 0;
    }
    CLI::App dummy;
    (void)dummy;
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    if (sample->parsed())
      return cmd_sample(s_kappa, s_dt, s_tmax, s_seed, s_replicas, s_common);
    if (green->parsed())
      return cmd_green_verify(g_kappa, g_z, g_eps, g_n, g_dt, g_tmax, g_seed, g_common);
    if (dim->parsed())
      return cmd_dimension(d_kappa, d_l, d_kmin, d_kmax, d_traces, d_dt, d_tmax, d_seed,
                           d_common);
    if (nat->parsed())
      return cmd_natural_measure(n_kappa, n_l, n_m, n_traces, n_dt, n_tmax, n_seed, n_common);
    if (cover->parsed())
      return cmd_cover(c_kappa, c_l, c_m, c_M, c_eps, c_replicas, c_dt, c_tmax, c_seed,
                       c_common);
    if (hc->parsed())
      return cmd_hcap_check(h_kappa, h_t, h_walkers, h_dt, h_seed, h_common);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case Errc::param:
      case Errc::domain:
      case Errc::format:
        return 2;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace sle
