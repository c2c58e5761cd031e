#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sausage/experiments.hpp"
#include "sausage/geometry.hpp"
#include "sausage/io.hpp"
#include "sausage/params.hpp"
#include "sausage/potential.hpp"
#include "sausage/process.hpp"
#include "sausage/rng.hpp"
#include "sausage/stats.hpp"

namespace {

constexpr const char* kToolVersion = "sausage_lab 1.0.0";

using namespace sausage;

struct Options {
  int dim = 1;
  double alpha = 0.6;
  double radius = 1.0;
  double t_end = 10.0;
  std::vector<double> t_checkpoints{50.0, 100.0, 200.0};
  double mesh = 0.01;
  int replicas = 500;
  std::uint64_t seed = kDefaultSeed;
  std::string method = "exact1d";
  double grid_res = 0.05;
  std::uint64_t mc_samples = 200000;
  double tail_factor = 0.0;
  int workers = 0;
  int k_max = 10;
  int moment_k = 2;
  double x_dist = 4.0;
  double sigma = 0.0;
  double quad_tol = 1e-8;
  std::string out;
  std::string format = "csv";
};

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.params = ProcessParams{o.dim, o.alpha, o.radius};
  cfg.t_checkpoints = o.t_checkpoints;
  cfg.mesh = o.mesh;
  cfg.replicas = o.replicas;
  cfg.volume.method = parse_volume_method(o.method);
  cfg.volume.grid_edge = o.grid_res;
  cfg.volume.mc_samples = o.mc_samples;
  cfg.tail_factor = o.tail_factor;
  cfg.master_seed = o.seed;
  cfg.workers = o.workers;
  cfg.quadrature_tolerance = o.quad_tol;
  return cfg;
}

ConfigMap make_config_map(const Options& o, const std::string& experiment) {
  ConfigMap m;
  m["experiment"] = experiment;
  m["dim"] = std::to_string(o.dim);
  m["alpha"] = format_double(o.alpha);
  m["radius"] = format_double(o.radius);
  m["t-end"] = format_double(o.t_end);
  std::string cks;
  for (std::size_t i = 0; i < o.t_checkpoints.size(); ++i) {
    if (i) cks += ',';
    cks += format_double(o.t_checkpoints[i]);
  }
  m["t-checkpoints"] = cks;
  m["mesh"] = format_double(o.mesh);
  m["replicas"] = std::to_string(o.replicas);
  m["seed"] = std::to_string(o.seed);
  m["method"] = o.method;
  m["grid-res"] = format_double(o.grid_res);
  m["mc-samples"] = std::to_string(o.mc_samples);
  m["tail-factor"] = format_double(o.tail_factor);
  m["workers"] = std::to_string(o.workers);
  m["k-max"] = std::to_string(o.k_max);
  m["moment-k"] = std::to_string(o.moment_k);
  m["x-dist"] = format_double(o.x_dist);
  m["sigma"] = format_double(o.sigma);
  m["quad-tol"] = format_double(o.quad_tol);
  return m;
}

void print_report(const ExperimentReport& rep) {
  std::printf("[%s]\n", rep.experiment.c_str());
  for (const auto& s : rep.stats) {
    if (s.stat_error > 0.0)
      std::printf("  %s = %s +- %s\n", s.name.c_str(),
                  format_double(s.value).c_str(),
                  format_double(s.stat_error).c_str());
    else
      std::printf("  %s = %s\n", s.name.c_str(),
                  format_double(s.value).c_str());
  }
  for (const auto& c : rep.checks)
    std::printf("  check %s: %s (%s)\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.tolerance.c_str());
  if (rep.inconclusive) std::printf("  inconclusive: %s\n", rep.note.c_str());
  if (rep.wall_seconds > 0.0)
    std::printf("  wall_seconds = %.3f\n", rep.wall_seconds);
}

void emit_report(const ExperimentReport& rep, const Options& o,
                 const std::string& started_at) {
  print_report(rep);
  if (o.out.empty()) return;
  const ConfigMap cfg = make_config_map(o, rep.experiment);
  if (o.format == "jsonl")
    write_jsonl(rep, cfg, o.seed, o.out);
  else
    write_csv(rep, o.out);
  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.config = cfg;
  manifest.seed = o.seed;
  manifest.started_at = started_at;
  manifest.finished_at = iso8601_utc_now();
  manifest.outputs = {o.out};
  write_manifest(manifest, o.out + ".manifest.json");
}

int run_selftest();

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (std::uint64_t env = 0; seed_from_environment(env)) o.seed = env;
  const std::string started_at = iso8601_utc_now();

  CLI::App app{"Simulation and verification lab for the volume of the "
               "unit-ball sausage of a rotationally invariant stable path"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);

  app.add_option("--dim", o.dim, "spatial dimension d");
  app.add_option("--alpha", o.alpha, "stability index in (0,2]");
  app.add_option("--radius", o.radius, "sausage radius");
  app.add_option("--t-end", o.t_end, "time horizon for single-path commands");
  app.add_option("--t-checkpoints", o.t_checkpoints,
                 "comma-separated checkpoint times")
      ->delimiter(',');
  auto* mesh_opt = app.add_option("--mesh", o.mesh, "skeleton time step");
  app.add_option("--replicas", o.replicas, "independent replicas");
  app.add_option("--seed", o.seed,
                 "master seed (SAUSAGE_LAB_SEED overrides the default)");
  app.add_option("--method", o.method, "volume estimator")
      ->check(CLI::IsMember({"exact1d", "grid", "hitmiss"}));
  app.add_option("--grid-res", o.grid_res, "voxel edge for the grid method");
  app.add_option("--mc-samples", o.mc_samples,
                 "draws for the hit-or-miss method");
  app.add_option("--tail-factor", o.tail_factor,
                 "tail window factor for overlap experiments");
  app.add_option("--workers", o.workers, "worker threads (0 = hardware)");
  app.add_option("--k-max", o.k_max, "checkpoint sequence block count");
  app.add_option("--moment-k", o.moment_k, "overlap moment order (1..3)");
  app.add_option("--x-dist", o.x_dist, "starting distance for tau-scaling");
  app.add_option("--sigma", o.sigma, "fluctuation scale for the lil command");
  app.add_option("--quad-tol", o.quad_tol, "quadrature tolerance");
  app.add_option("--out", o.out, "output file (plus <out>.manifest.json)");
  app.add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto sub = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };
  CLI::App* c_capacity = sub("capacity", "capacity of the unit ball");
  bool green_normalized = false;
  c_capacity->add_flag("--green", green_normalized,
                       "Green-normalized capacity (the volume growth rate)");
  CLI::App* c_phi = sub("phi", "hitting probability of the unit ball");
  double point_r = 2.0;
  c_phi->add_option("r", point_r, "distance from the origin")->required();
  CLI::App* c_green = sub("green", "Green function at distance r");
  c_green->add_option("r", point_r, "distance from the origin")->required();
  CLI::App* c_hfun = sub("hfun", "variance growth scale h(t)");
  double hfun_t = 100.0;
  c_hfun->add_option("t", hfun_t, "time")->required();
  CLI::App* c_simulate = sub("simulate", "one path skeleton as CSV");
  CLI::App* c_volume = sub("volume", "sausage volume of one path");
  CLI::App* c_intersect =
      sub("intersect", "overlap volume of two independent paths");
  CLI::App* c_lln = sub("lln", "mean growth against capacity");
  CLI::App* c_sigma = sub("sigma", "variance slope estimate");
  CLI::App* c_clt = sub("clt", "standardized volumes against N(0,1)");
  CLI::App* c_fclt = sub("fclt", "covariance against the Brownian limit");
  CLI::App* c_moments = sub("moments", "overlap moment bound for two paths");
  CLI::App* c_tau = sub("tau-scaling", "hitting-time scaling identity");
  CLI::App* c_lilseq = sub("lil-seq", "iterated-logarithm checkpoint sequence");
  CLI::App* c_lil = sub("lil", "iterated-logarithm envelope statistics");
  CLI::App* c_selftest = sub("selftest", "quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_capacity->parsed()) {
      const double v = green_normalized
                           ? capacity_unit_ball_green(o.dim, o.alpha)
                           : capacity_unit_ball(o.dim, o.alpha);
      std::printf("%s\n", format_double_pretty(v).c_str());
      return 0;
    }
    if (c_phi->parsed()) {
      double v = 0.0;
      if (o.alpha == 2.0) {
        v = phi_brownian_radial(point_r, o.dim);
      } else {
        PotentialContext ctx{ProcessParams{o.dim, o.alpha, o.radius},
                             o.quad_tol};
        v = phi_radial(point_r, ctx);
      }
      std::printf("%s\n", format_double_pretty(v).c_str());
      return 0;
    }
    if (c_green->parsed()) {
      std::printf("%s\n",
                  format_double_pretty(
                      green_function_radial(point_r, o.dim, o.alpha))
                      .c_str());
      return 0;
    }
    if (c_hfun->parsed()) {
      std::printf("%s\n",
                  format_double_pretty(h_function(hfun_t, o.dim, o.alpha))
                      .c_str());
      return 0;
    }
    if (c_simulate->parsed()) {
      const ProcessParams params{o.dim, o.alpha, o.radius};
      RandomStream stream = RandomStream(o.seed, 0).substream(0);
      const PathSkeleton path =
          simulate_skeleton(params, o.t_end, o.mesh, stream);
      ExperimentReport rep;
      rep.experiment = "simulate";
      rep.table_header = {"t"};
      for (int i = 0; i < o.dim; ++i)
        rep.table_header.push_back("x" + std::to_string(i));
      for (std::size_t i = 0; i < path.size(); ++i) {
        std::vector<double> row{path.times[i]};
        for (int j = 0; j < o.dim; ++j) row.push_back(path.position(i)[j]);
        rep.table_rows.push_back(std::move(row));
      }
      if (o.out.empty()) {
        std::fputs(to_csv(rep).c_str(), stdout);
      } else {
        emit_report(rep, o, started_at);
      }
      return 0;
    }
    if (c_volume->parsed()) {
      const ProcessParams params{o.dim, o.alpha, o.radius};
      const RandomStream root(o.seed, 0);
      RandomStream stream = root.substream(0);
      const PathSkeleton path =
          simulate_skeleton(params, o.t_end, o.mesh, stream);
      const SausageSkeleton body = make_sausage(path, o.radius);
      VolumeOptions vo{parse_volume_method(o.method), o.grid_res, o.mc_samples};
      const RandomStream es = root.substream(1000);
      const VolumeEstimate est = sausage_volume(body, vo, &es);
      ExperimentReport rep;
      rep.experiment = "volume";
      rep.stats = {{"volume", est.value, est.stat_error},
                   {"t_end", o.t_end, 0.0},
                   {"samples", static_cast<double>(est.samples), 0.0}};
      emit_report(rep, o, started_at);
      return 0;
    }
    if (c_intersect->parsed()) {
      const ProcessParams params{o.dim, o.alpha, o.radius};
      const RandomStream root_a(o.seed, 0), root_b(o.seed, 1);
      RandomStream sa = root_a.substream(0), sb = root_b.substream(0);
      const PathSkeleton pa = simulate_skeleton(params, o.t_end, o.mesh, sa);
      const PathSkeleton pb = simulate_skeleton(params, o.t_end, o.mesh, sb);
      VolumeOptions vo{parse_volume_method(o.method), o.grid_res, o.mc_samples};
      const RandomStream es = root_a.substream(3000);
      const VolumeEstimate est = intersection_volume(
          make_sausage(pa, o.radius), make_sausage(pb, o.radius), vo, &es);
      ExperimentReport rep;
      rep.experiment = "intersect";
      rep.stats = {{"overlap", est.value, est.stat_error},
                   {"t_end", o.t_end, 0.0}};
      emit_report(rep, o, started_at);
      return 0;
    }
    if (c_lln->parsed()) {
      const ExperimentConfig cfg = make_config(o);
      const auto records = run_volume_replicas(cfg);
      emit_report(lln_capacity_check(records, cfg), o, started_at);
      return 0;
    }
    if (c_sigma->parsed()) {
      const ExperimentConfig cfg = make_config(o);
      const auto records = run_volume_replicas(cfg);
      const SigmaEstimate est = estimate_sigma(records, cfg);
      ExperimentReport rep;
      rep.experiment = "sigma";
      rep.stats = {{"sigma2", est.sigma2, est.half_width / 2.0},
                   {"sigma", est.sigma, 0.0},
                   {"half_width", est.half_width, 0.0},
                   {"variance_envelope", est.envelope, 0.0}};
      rep.checks.push_back({"sigma2_positive", est.sigma2 > 0.0, "sigma^2 > 0"});
      emit_report(rep, o, started_at);
      return 0;
    }
    if (c_clt->parsed()) {
      const ExperimentConfig cfg = make_config(o);
      if (!(cfg.params.ratio() > 1.5))
        throw std::domain_error("Gaussian limit requires d/alpha > 3/2");
      const auto records = run_volume_replicas(cfg);
      const SigmaEstimate est = estimate_sigma(records, cfg);
      emit_report(clt_experiment(records, est, cfg), o, started_at);
      return 0;
    }
    if (c_fclt->parsed()) {
      const ExperimentConfig cfg = make_config(o);
      const auto records = run_volume_replicas(cfg);
      const SigmaEstimate est = estimate_sigma(records, cfg);
      emit_report(fclt_covariance_experiment(records, est, cfg), o, started_at);
      return 0;
    }
    if (c_moments->parsed()) {
      const ExperimentConfig cfg = make_config(o);
      emit_report(intersection_moment_experiment(cfg, o.moment_k), o,
                  started_at);
      return 0;
    }
    if (c_tau->parsed()) {
      Options to = o;
      if (to.t_checkpoints.size() != 1) to.t_checkpoints = {o.t_end};
      const ExperimentConfig cfg = make_config(to);
      emit_report(tau_scaling_experiment(cfg, o.x_dist), to, started_at);
      return 0;
    }
    if (c_lilseq->parsed()) {
      ExperimentReport rep;
      rep.experiment = "lil_seq";
      rep.table_header = {"n"};
      for (std::uint64_t n : lil_checkpoint_sequence(o.k_max))
        rep.table_rows.push_back({static_cast<double>(n)});
      if (o.out.empty())
        std::fputs(to_csv(rep).c_str(), stdout);
      else
        emit_report(rep, o, started_at);
      return 0;
    }
    if (c_lil->parsed()) {
      if (!(o.sigma > 0.0))
        throw std::domain_error("the lil command needs --sigma > 0");
      Options lo = o;
      if (mesh_opt->count() == 0) lo.mesh = 0.5;
      const ExperimentConfig cfg = make_config(lo);
      emit_report(lil_paths_experiment(cfg, lo.sigma, lo.k_max), lo,
                  started_at);
      return 0;
    }
    if (c_selftest->parsed()) return run_selftest();
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
  return 0;
}

namespace {

int run_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok, const std::string& detail = "") {
    if (ok) {
      std::printf("ok: %s\n", name);
    } else {
      ++failures;
      std::printf("FAILED: %s%s%s\n", name, detail.empty() ? "" : " - ",
                  detail.c_str());
    }
  };
  auto near = [](double a, double b, double tol) {
    return std::abs(a - b) <= tol;
  };

  check("capacity(3,2) = 1",
        near(capacity_unit_ball(3, 2.0), 1.0, 1e-12));
  check("capacity(3,1.5) closed form",
        near(capacity_unit_ball(3, 1.5), 0.78689373267739748, 1e-12));
  check("green-normalized capacity(2,1) = 4",
        near(capacity_unit_ball_green(2, 1.0), 4.0, 1e-12));
  check("green(3,2) kernel constant",
        near(green_function_radial(2.0, 3, 2.0), 0.039788735772973834, 1e-15));
  {
    PotentialContext ctx{ProcessParams{2, 1.0, 1.0}, 1e-8};
    check("phi(2,1) at r=2 equals 1/3",
          near(phi_radial(2.0, ctx), 1.0 / 3.0, 1e-6));
  }
  check("h flat regime", near(h_function(100.0, 3, 1.0), 1.0, 1e-15));
  check("h log regime",
        near(h_function(100.0, 2, 1.0), 4.6319901130538899, 1e-12));
  check("h power regime",
        near(h_function(100.0, 3, 5.0 / 3.0), 2.5118864315095801, 1e-12));
  {
    const auto seq = lil_checkpoint_sequence(1);
    check("checkpoint sequence k_max=1",
          seq == std::vector<std::uint64_t>({0, 2, 3}));
  }
  {
    const auto kat = philox4x32({0, 0, 0, 0}, {0, 0});
    check("philox counter-0 block",
          kat == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du,
                                              0xbc57ac4cu, 0x9b00dbd8u});
  }
  {
    std::vector<double> q{0.25, 0.5, 0.75};
    const double d =
        ks_statistic(q, [](double x) { return std::min(1.0, std::max(0.0, x)); });
    check("ks quantile example", near(d, 0.25, 1e-15));
  }
  {
    // Laplace transform of the subordinator increment at two probe points.
    RandomStream s(12345, 0);
    double acc1 = 0.0, acc4 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double x = sample_subordinator_increment(0.75, 1.0, s);
      acc1 += std::exp(-x);
      acc4 += std::exp(-4.0 * x);
    }
    check("subordinator Laplace probe 1",
          near(acc1 / n, std::exp(-1.0), 5e-3));
    check("subordinator Laplace probe 4",
          near(acc4 / n, std::exp(-std::pow(4.0, 0.75)), 5e-3));
  }
  {
    // 1-D estimator consensus on one path.
    const ProcessParams params{1, 0.6, 1.0};
    RandomStream stream = RandomStream(7, 0).substream(0);
    const PathSkeleton path = simulate_skeleton(params, 5.0, 0.05, stream);
    const SausageSkeleton body = make_sausage(path, 1.0);
    const double exact = volume_exact_1d(body).value;
    const double grid = volume_grid(body, 0.002).value;
    const VolumeEstimate mc =
        volume_hit_or_miss(body, 200000, RandomStream(7, 0).substream(99));
    check("grid vs exact volume", near(grid, exact, 0.01 * exact));
    check("hit-or-miss vs exact volume",
          std::abs(mc.value - exact) <= 4.0 * mc.stat_error + 1e-9);
  }
  std::printf(failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace
