// Command-line driver: `alefem run` for a TOML configuration and
// `alefem bench` for the canonical rising-bubble and droplet setups.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alefem/alefem.hpp"

namespace fs = std::filesystem;
using namespace alefem;

namespace
{

enum Exit { ok = 0, failure = 1, bad_config = 2, solver_failed = 3 };

struct Common {
  std::string scheme;
  int level = 0;
  int snapshot_every = -1;
  std::string out;
};

void apply_overrides(RunConfig &rc, const Common &c)
{
  if (!c.scheme.empty())
    rc.scheme.variant = SchemeVariant::parse(c.scheme);
  if (c.snapshot_every >= 0)
    rc.snapshot_every = c.snapshot_every;
  rc.level = c.level;
}

bool is_droplet(const RunConfig &rc) { return rc.initial.shape == "droplet"; }

void print_summary(const std::string &label, const RunConfig &rc, const RunResult &res)
{
  const RunSummary &s = res.summary;
  std::printf("%-10s %-8s level %d  s_min %.4f  t(s_min) %.4f  Vc_max %.4f  t(Vc_max) %.4f  "
              "zc_final %.4f  vDelta_final %.2e\n",
              label.c_str(), rc.scheme.variant.name().c_str(), rc.level, s.s_min, s.t_at_s_min,
              s.Vc_max, s.t_at_Vc_max, s.zc_final, s.vDelta_final);
  if (!is_droplet(rc))
    return;
  DropletSpec spec;
  spec.n = rc.initial.mode;
  spec.epsilon = rc.initial.epsilon;
  spec.R0 = rc.initial.radius;
  spec.centre = rc.initial.centre;
  const Physics &p = rc.scheme.physics;
  const DropletReference ref = droplet_reference(spec, p.rho_inner, p.mu_inner, p.gamma);
  std::vector<double> t, y;
  for (std::size_t k = 0; k < res.samples.size(); ++k) {
    t.push_back(res.samples[k].t);
    y.push_back(res.pole_z[k] - spec.centre - spec.R0);
  }
  try {
    const OscillationFit fit = fit_oscillation(t, y);
    std::printf("%-10s pole oscillation  omega %.4f (reference %.4f)  decay %.4f (reference %.4f)\n",
                label.c_str(), fit.omega, ref.omega, fit.decay, ref.lambda);
  } catch (const Error &e) {
    std::printf("%-10s pole oscillation  fit unavailable: %s\n", label.c_str(), e.what());
  }
}

int execute(const std::string &label, const RunConfig &rc, const std::optional<fs::path> &out)
{
  const SchemeConfig cfg = rc.at_level(rc.level);
  const GeneratingCurve curve = rc.initial.curve(rc.level);
  RunOptions opt;
  opt.out = out;
  opt.snapshot_every = rc.snapshot_every;
  if (is_droplet(rc))
    opt.pole_rest = rc.initial.centre + rc.initial.radius;
  const RunResult res = run_simulation(cfg, curve, opt);
  print_summary(label, rc, res);
  return ok;
}

int guarded(const std::function<int()> &body)
{
  try {
    return body();
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return bad_config;
  } catch (const SolverError &e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver_failed;
  } catch (const MeshError &e) {
    std::cerr << "mesh failure: " << e.what() << '\n';
    return solver_failed;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Axisymmetric two-phase ALE finite element flow solver"};
  app.require_subcommand(1);

  Common run_opts;
  std::string config_path;
  CLI::App *run = app.add_subcommand("run", "Run a simulation described by a TOML file");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--out", run_opts.out, "Output directory")->default_val("out");
  run->add_option("--snapshot-every", run_opts.snapshot_every, "Snapshot cadence in steps")
      ->check(CLI::PositiveNumber);
  run->add_option("--scheme", run_opts.scheme, "Scheme override, e.g. n-stab or c-equiV");
  run->add_option("--level", run_opts.level, "Refinement level")->check(CLI::Range(0, 2));

  Common bench_opts;
  std::string bench_name;
  CLI::App *bench = app.add_subcommand("bench", "Run a canonical benchmark");
  bench->add_option("name", bench_name, "bubble1, bubble2, droplet2 or droplet5")->required();
  bench->add_option("--level", bench_opts.level, "Refinement level")->check(CLI::Range(0, 2));
  bench->add_option("--scheme", bench_opts.scheme, "Scheme override");
  bench->add_option("--out", bench_opts.out, "Output directory (optional)");
  bench->add_option("--snapshot-every", bench_opts.snapshot_every, "Snapshot cadence in steps")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return guarded([&] {
      RunConfig rc = load_config(config_path);
      apply_overrides(rc, run_opts);
      return execute(fs::path(config_path).stem().string(), rc, fs::path(run_opts.out));
    });
  }
  return guarded([&] {
    RunConfig rc = benchmark_config(bench_name);
    apply_overrides(rc, bench_opts);
    std::optional<fs::path> out;
    if (!bench_opts.out.empty())
      out = fs::path(bench_opts.out);
    return execute(bench_name, rc, out);
  });
}
