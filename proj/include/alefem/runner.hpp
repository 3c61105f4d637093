#ifndef ALEFEM_RUNNER_HPP
#define ALEFEM_RUNNER_HPP

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "alefem/benchmarks.hpp"
#include "alefem/io.hpp"
#include "alefem/schemes.hpp"

namespace alefem
{

struct RunOptions {
  std::optional<std::filesystem::path> out; // no files when empty
  int snapshot_every = 0;
  std::optional<double> pole_rest; // writes pole.csv (t, z, displacement) when set
  std::function<void(const RunState &before, const RunState &after, const StepReport &)> on_step;
};

struct RunResult {
  std::vector<BenchmarkSample> samples;
  std::vector<double> pole_z; // height of the upper axis point
  RunSummary summary;
  RunState final_state;
};

inline int num_steps(const SchemeConfig &cfg)
{
  return static_cast<int>(std::llround(cfg.t_end / cfg.dt));
}

/// Time loop from U⁰ = 0 to t_end with per-step sampling.
inline RunResult run_simulation(const SchemeConfig &cfg, const GeneratingCurve &curve0,
                                const RunOptions &opt = {})
{
  cfg.validate();
  RunState state = RunState::initial(cfg, curve0);
  RunResult res;
  std::optional<io::RunCsv> csv;
  std::optional<std::ofstream> pole;
  std::filesystem::path snaps;
  if (opt.out) {
    std::filesystem::create_directories(*opt.out);
    csv.emplace(*opt.out / "run.csv");
    if (opt.pole_rest) {
      pole.emplace(io::open_output(*opt.out / "pole.csv"));
      *pole << "t,z,displacement\n";
    }
    if (opt.snapshot_every > 0) {
      snaps = *opt.out / "snapshots";
      std::filesystem::create_directories(snaps);
    }
  }
  auto record = [&](const RunState &s, const StepReport *rep) {
    res.samples.push_back(sample(s, rep));
    res.pole_z.push_back(s.curve.nodes().back().z);
    if (csv)
      csv->write(res.samples.back());
    if (pole)
      *pole << s.t << ',' << res.pole_z.back() << ',' << res.pole_z.back() - *opt.pole_rest << '\n';
    if (!snaps.empty() && s.step % opt.snapshot_every == 0) {
      io::write_curve_csv(snaps / io::snapshot_name("curve", s.step, "csv"), s.curve);
      io::write_mesh_vtk(snaps / io::snapshot_name("mesh", s.step, "vtk"), s.mesh, s.U, s.P);
    }
  };
  record(state, nullptr);
  const int steps = num_steps(cfg);
  for (int m = 0; m < steps; ++m) {
    StepReport rep;
    RunState next = step(state, cfg, &rep);
    if (opt.on_step)
      opt.on_step(state, next, rep);
    state = std::move(next);
    record(state, &rep);
  }
  res.summary = summarize(res.samples);
  if (opt.out)
    io::write_summary(*opt.out / "summary.json", res.summary);
  res.final_state = std::move(state);
  return res;
}

} // namespace alefem

#endif
