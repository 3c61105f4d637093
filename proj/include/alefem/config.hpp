#ifndef ALEFEM_CONFIG_HPP
#define ALEFEM_CONFIG_HPP

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <toml.hpp>

#include "alefem/benchmarks.hpp"
#include "alefem/schemes.hpp"

namespace alefem
{

/// Initial interface: a sphere or a Legendre-perturbed droplet.
struct InitialShape {
  std::string shape = "sphere";
  double centre = 0.5;
  double radius = 0.25;
  int mode = 2;
  double epsilon = 0.0;
  int segments = 16;

  GeneratingCurve curve(int level) const
  {
    const auto J = static_cast<std::size_t>(segments << level);
    if (shape == "sphere")
      return make_semicircle(centre, radius, J);
    DropletSpec spec;
    spec.n = mode;
    spec.epsilon = epsilon;
    spec.R0 = radius;
    spec.centre = centre;
    return droplet_initial_curve(spec, J);
  }
};

struct RunConfig {
  SchemeConfig scheme;
  InitialShape initial;
  int snapshot_every = 0; // 0: no snapshots
  int level = 0;

  /// Scheme configuration at the given refinement level: the stored values
  /// are level 0, h and the segment count halve/double per level and Δt
  /// shrinks by four.
  SchemeConfig at_level(int l) const
  {
    if (l < 0 || l > 2)
      throw ConfigError("refinement level must be 0, 1 or 2");
    SchemeConfig c = scheme;
    c.mesh.target_h = scheme.mesh.target_h / double(1 << l);
    c.dt = scheme.dt / double(1 << (2 * l));
    return c;
  }
};

namespace detail
{

inline void check_keys(const toml::table &tbl, const std::string &section,
                       const std::set<std::string> &allowed, std::vector<std::string> &bad)
{
  for (const auto &[k, v] : tbl) {
    const std::string key(k.str());
    if (!allowed.count(key))
      bad.push_back(section.empty() ? key : section + "." + key);
  }
}

template <class T>
void read(const toml::table *tbl, const char *key, T &value, const std::string &section,
          std::vector<std::string> &bad)
{
  if (!tbl)
    return;
  const toml::node *n = tbl->get(key);
  if (!n)
    return;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = n->value<double>())
      value = *v;
    else
      bad.push_back(section + "." + key);
  } else if constexpr (std::is_same_v<T, int>) {
    if (auto v = n->value<int64_t>())
      value = static_cast<int>(*v);
    else
      bad.push_back(section + "." + key);
  } else {
    if (auto v = n->value<std::string>())
      value = *v;
    else
      bad.push_back(section + "." + key);
  }
}

inline void read_boundary(const toml::table *tbl, const char *key, BoundaryKind &kind,
                          const std::string &section, std::vector<std::string> &bad)
{
  std::string s;
  read(tbl, key, s, section, bad);
  if (s.empty())
    return;
  if (s == "no_slip")
    kind = BoundaryKind::no_slip;
  else if (s == "free_slip")
    kind = BoundaryKind::free_slip;
  else
    bad.push_back(section + "." + key);
}

} // namespace detail

/// Parses a TOML run description with sections [scheme] (plus
/// [scheme.initial]), [physics], [mesh] and [output]. Unknown keys and
/// invalid values are reported together in one ConfigError.
inline RunConfig parse_config(const toml::table &root)
{
  RunConfig rc;
  std::vector<std::string> bad;
  detail::check_keys(root, "", {"scheme", "physics", "mesh", "output"}, bad);

  const toml::table *scheme = root["scheme"].as_table();
  const toml::table *physics = root["physics"].as_table();
  const toml::table *mesh = root["mesh"].as_table();
  const toml::table *output = root["output"].as_table();
  const toml::table *initial = scheme ? (*scheme)["initial"].as_table() : nullptr;

  SchemeConfig &c = rc.scheme;
  if (scheme) {
    detail::check_keys(*scheme, "scheme",
                       {"name", "dt", "t_end", "picard_tol", "picard_max_iterations", "solver",
                        "preconditioner", "gmres_restart", "gmres_tol", "gmres_max_iterations",
                        "initial"},
                       bad);
    std::string name = c.variant.name();
    detail::read(scheme, "name", name, "scheme", bad);
    try {
      c.variant = SchemeVariant::parse(name);
    } catch (const ConfigError &) {
      bad.push_back("scheme.name");
    }
    detail::read(scheme, "dt", c.dt, "scheme", bad);
    detail::read(scheme, "t_end", c.t_end, "scheme", bad);
    detail::read(scheme, "picard_tol", c.picard_tol, "scheme", bad);
    detail::read(scheme, "picard_max_iterations", c.picard_max_iterations, "scheme", bad);
    detail::read(scheme, "solver", c.solver, "scheme", bad);
    detail::read(scheme, "preconditioner", c.linear.preconditioner, "scheme", bad);
    detail::read(scheme, "gmres_restart", c.linear.gmres.restart, "scheme", bad);
    detail::read(scheme, "gmres_tol", c.linear.gmres.rel_tol, "scheme", bad);
    detail::read(scheme, "gmres_max_iterations", c.linear.gmres.max_iterations, "scheme", bad);
  }
  if (initial) {
    detail::check_keys(*initial, "scheme.initial",
                       {"shape", "centre", "radius", "mode", "epsilon", "segments"}, bad);
    InitialShape &s = rc.initial;
    detail::read(initial, "shape", s.shape, "scheme.initial", bad);
    detail::read(initial, "centre", s.centre, "scheme.initial", bad);
    detail::read(initial, "radius", s.radius, "scheme.initial", bad);
    detail::read(initial, "mode", s.mode, "scheme.initial", bad);
    detail::read(initial, "epsilon", s.epsilon, "scheme.initial", bad);
    detail::read(initial, "segments", s.segments, "scheme.initial", bad);
    if (s.shape != "sphere" && s.shape != "droplet")
      bad.push_back("scheme.initial.shape");
    if (s.segments < 2)
      bad.push_back("scheme.initial.segments");
    if (!(s.radius > 0.0))
      bad.push_back("scheme.initial.radius");
  }
  if (physics) {
    detail::check_keys(*physics, "physics",
                       {"rho_inner", "rho_outer", "mu_inner", "mu_outer", "gamma", "gravity"}, bad);
    Physics &p = c.physics;
    detail::read(physics, "rho_inner", p.rho_inner, "physics", bad);
    detail::read(physics, "rho_outer", p.rho_outer, "physics", bad);
    detail::read(physics, "mu_inner", p.mu_inner, "physics", bad);
    detail::read(physics, "mu_outer", p.mu_outer, "physics", bad);
    detail::read(physics, "gamma", p.gamma, "physics", bad);
    if (const toml::node *g = physics->get("gravity")) {
      const toml::array *a = g->as_array();
      if (a && a->size() == 2 && a->get(0)->value<double>() && a->get(1)->value<double>())
        p.gravity = {*a->get(0)->value<double>(), *a->get(1)->value<double>()};
      else
        bad.push_back("physics.gravity");
    }
  }
  if (mesh) {
    detail::check_keys(*mesh, "mesh",
                       {"r_max", "z_min", "z_max", "target_h", "far_factor", "grading",
                        "min_angle_deg", "bottom", "right", "top"},
                       bad);
    detail::read(mesh, "r_max", c.domain.r_max, "mesh", bad);
    detail::read(mesh, "z_min", c.domain.z_min, "mesh", bad);
    detail::read(mesh, "z_max", c.domain.z_max, "mesh", bad);
    detail::read(mesh, "target_h", c.mesh.target_h, "mesh", bad);
    detail::read(mesh, "far_factor", c.mesh.far_factor, "mesh", bad);
    detail::read(mesh, "grading", c.mesh.grading, "mesh", bad);
    detail::read(mesh, "min_angle_deg", c.mesh.min_angle_deg, "mesh", bad);
    detail::read_boundary(mesh, "bottom", c.domain.bottom, "mesh", bad);
    detail::read_boundary(mesh, "right", c.domain.right, "mesh", bad);
    detail::read_boundary(mesh, "top", c.domain.top, "mesh", bad);
  }
  if (output) {
    detail::check_keys(*output, "output", {"snapshot_every"}, bad);
    detail::read(output, "snapshot_every", rc.snapshot_every, "output", bad);
    if (rc.snapshot_every < 0)
      bad.push_back("output.snapshot_every");
  }
  for (const auto &k : c.invalid_keys())
    bad.push_back(k);
  if (!bad.empty()) {
    std::set<std::string> uniq(bad.begin(), bad.end());
    std::string msg = "invalid configuration keys:";
    for (const auto &k : uniq)
      msg += " " + k;
    throw ConfigError(msg);
  }
  return rc;
}

inline RunConfig parse_config_string(const std::string &text)
{
  try {
    return parse_config(toml::parse(text));
  } catch (const toml::parse_error &e) {
    throw ConfigError(std::string("TOML parse error: ") + std::string(e.description()));
  }
}

inline RunConfig load_config(const std::filesystem::path &path)
{
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: " + path.string());
  try {
    return parse_config(toml::parse_file(path.string()));
  } catch (const toml::parse_error &e) {
    throw ConfigError("TOML parse error in " + path.string() + ": " + std::string(e.description()));
  }
}

/// Configuration of a named benchmark ("bubble1", "bubble2", "droplet2",
/// "droplet5") at level 0.
inline RunConfig benchmark_config(const std::string &name)
{
  RunConfig rc;
  Setup s;
  if (name == "bubble1")
    s = bubble_setup(BubbleCase::I, 0, "n-stab");
  else if (name == "bubble2")
    s = bubble_setup(BubbleCase::II, 0, "n-stabV");
  else if (name == "droplet2")
    s = droplet_setup(2, 0, "n-equiV");
  else if (name == "droplet5")
    s = droplet_setup(5, 0, "n-equiV");
  else
    throw ConfigError("unknown benchmark '" + name +
                      "' (expected bubble1, bubble2, droplet2 or droplet5)");
  rc.scheme = s.config;
  if (name.rfind("bubble", 0) == 0) {
    rc.initial = InitialShape{"sphere", 0.5, 0.25, 2, 0.0, 16};
  } else {
    const DropletSpec d = droplet_spec(name == "droplet2" ? 2 : 5);
    rc.initial = InitialShape{"droplet", d.centre, d.R0, d.n, d.epsilon, 64};
  }
  return rc;
}

} // namespace alefem

#endif
