#ifndef ALEFEM_MESH_HPP
#define ALEFEM_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alefem/curve.hpp"
#include "alefem/triangulation.hpp"
#include "alefem/vec2.hpp"

namespace alefem
{

/// Boundary condition attached to a side of the rectangle.
enum class BoundaryKind : std::uint8_t {
  no_slip,   // both velocity components vanish
  free_slip, // normal component vanishes
  axis,      // symmetry axis r = 0
};

/// Rectangle [0, r_max] × [z_min, z_max] of the meridian half-plane.
struct Domain {
  double r_max = 0.5;
  double z_min = 0.0;
  double z_max = 2.0;
  BoundaryKind bottom = BoundaryKind::no_slip;
  BoundaryKind right = BoundaryKind::free_slip;
  BoundaryKind top = BoundaryKind::no_slip;

  double diameter() const { return std::hypot(r_max, z_max - z_min); }
  BoundaryKind kind(cdt::Side side) const
  {
    switch (side) {
    case cdt::Side::bottom: return bottom;
    case cdt::Side::right: return right;
    case cdt::Side::top: return top;
    case cdt::Side::axis: return BoundaryKind::axis;
    }
    return BoundaryKind::axis;
  }
};

enum class Phase : std::uint8_t { inner, outer };

/// Bit flags per vertex recording the rectangle sides it lies on.
namespace side_bits
{
inline constexpr std::uint8_t bottom = 1, right = 2, top = 4, axis = 8;
inline constexpr std::uint8_t of(cdt::Side s) { return std::uint8_t(1u << int(s)); }
} // namespace side_bits

/// Interface-fitted triangulation with edge numbering and phase labels.
///
/// Local edge k of a triangle is opposite its local vertex k. Edges on the
/// rectangle carry their side; interface edges map to curve segments.
struct FittedMesh {
  Domain domain;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Phase> phase;

  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<int> edge_side;          // -1 for interior edges
  std::vector<std::uint8_t> vertex_sides;

  std::vector<int> interface_vertex;   // curve node -> mesh vertex
  std::vector<int> interface_edge;     // curve segment -> mesh edge

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  double signed_area(std::size_t t) const
  {
    const auto &v = triangles[t];
    return 0.5 * cross(vertices[v[1]] - vertices[v[0]], vertices[v[2]] - vertices[v[0]]);
  }

  /// Copy with moved vertices and identical connectivity.
  FittedMesh moved(std::vector<Vec2> new_vertices) const
  {
    if (new_vertices.size() != vertices.size())
      throw MeshError("moved mesh needs one position per vertex");
    FittedMesh out = *this;
    out.vertices = std::move(new_vertices);
    return out;
  }

  /// Builds edges, boundary tags and phase labels from raw connectivity.
  /// interface_vertex must already be set. Interior edges of the rectangle
  /// joining two boundary vertices of the same side are resolved by their
  /// adjacency count.
  void finalize()
  {
    std::map<std::pair<int, int>, int> lookup;
    edges.clear();
    tri_edges.assign(triangles.size(), {-1, -1, -1});
    std::vector<int> count;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      if (!(signed_area(t) > 0.0))
        throw MeshError("triangle " + std::to_string(t) + " is degenerate or inverted");
      for (int k = 0; k < 3; ++k) {
        int a = triangles[t][(k + 1) % 3], b = triangles[t][(k + 2) % 3];
        if (a > b)
          std::swap(a, b);
        auto [it, fresh] = lookup.try_emplace({a, b}, static_cast<int>(edges.size()));
        if (fresh) {
          edges.push_back({a, b});
          count.push_back(0);
        }
        ++count[it->second];
        tri_edges[t][k] = it->second;
      }
    }
    edge_side.assign(edges.size(), -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (count[e] != 1)
        continue;
      const std::uint8_t common = vertex_sides[edges[e][0]] & vertex_sides[edges[e][1]];
      if (!common)
        throw MeshError("boundary edge does not lie on the rectangle");
      for (int s = 0; s < 4; ++s)
        if (common & (1u << s))
          edge_side[e] = s;
    }

    // Interface edges in curve order.
    interface_edge.clear();
    for (std::size_t j = 0; j + 1 < interface_vertex.size(); ++j) {
      int a = interface_vertex[j], b = interface_vertex[j + 1];
      if (a > b)
        std::swap(a, b);
      auto it = lookup.find({a, b});
      if (it == lookup.end())
        throw MeshError("curve segment " + std::to_string(j) + " is not a mesh edge");
      interface_edge.push_back(it->second);
    }
    label_phases();
  }

private:
  void label_phases()
  {
    std::vector<char> is_interface(edges.size(), 0);
    for (int e : interface_edge)
      is_interface[e] = 1;
    std::vector<std::vector<int>> edge_tris(edges.size());
    for (std::size_t t = 0; t < triangles.size(); ++t)
      for (int k = 0; k < 3; ++k)
        edge_tris[tri_edges[t][k]].push_back(static_cast<int>(t));

    std::vector<int> label(triangles.size(), -1);
    std::vector<int> stack;
    // The inner region lies to the left of the oriented curve.
    for (std::size_t j = 0; j + 1 < interface_vertex.size(); ++j) {
      const int a = interface_vertex[j], b = interface_vertex[j + 1];
      for (int t : edge_tris[interface_edge[j]]) {
        const auto &v = triangles[t];
        bool ccw = false;
        for (int k = 0; k < 3; ++k)
          if (v[k] == a && v[(k + 1) % 3] == b)
            ccw = true;
        const int want = ccw ? 0 : 1;
        if (label[t] >= 0 && label[t] != want)
          throw MeshError("inconsistent phase labels");
        if (label[t] < 0) {
          label[t] = want;
          stack.push_back(t);
        }
      }
    }
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int e = tri_edges[t][k];
        if (is_interface[e])
          continue;
        for (int n : edge_tris[e]) {
          if (label[n] < 0) {
            label[n] = label[t];
            stack.push_back(n);
          } else if (label[n] != label[t]) {
            throw MeshError("interface does not separate the phases");
          }
        }
      }
    }
    phase.resize(triangles.size());
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      if (label[t] < 0)
        throw MeshError("triangle without phase label");
      phase[t] = label[t] == 0 ? Phase::inner : Phase::outer;
    }
  }
};

/// Per-triangle density and viscosity.
struct PhaseCoefficients {
  std::vector<double> rho;
  std::vector<double> mu;
};

inline PhaseCoefficients phase_coefficients(const FittedMesh &mesh, double rho_inner,
                                            double rho_outer, double mu_inner, double mu_outer)
{
  PhaseCoefficients c;
  c.rho.resize(mesh.num_triangles());
  c.mu.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const bool in = mesh.phase[t] == Phase::inner;
    c.rho[t] = in ? rho_inner : rho_outer;
    c.mu[t] = in ? mu_inner : mu_outer;
  }
  return c;
}

inline double triangle_min_angle(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  auto angle = [](const Vec2 &p, const Vec2 &q, const Vec2 &r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

/// Smallest interior angle over all triangles, in radians.
inline double min_angle(const FittedMesh &mesh)
{
  double lo = std::numbers::pi;
  for (const auto &t : mesh.triangles)
    lo = std::min(lo, triangle_min_angle(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                         mesh.vertices[t[2]]));
  return lo;
}

inline constexpr double remesh_angle = std::numbers::pi / 18.0;

inline bool needs_remesh(const FittedMesh &mesh) { return min_angle(mesh) < remesh_angle; }

/// Checks that every curve node coincides with its mesh vertex.
inline void assert_fitted(const FittedMesh &mesh, const GeneratingCurve &curve)
{
  if (mesh.interface_vertex.size() != curve.num_nodes())
    throw MeshError("mesh and curve node counts differ");
  for (std::size_t j = 0; j < curve.num_nodes(); ++j)
    if (!(mesh.vertices[mesh.interface_vertex[j]] == curve.node(j)))
      throw MeshError("curve node " + std::to_string(j) + " is off its mesh vertex");
}

struct MeshOptions {
  double target_h = 1.0 / 16.0; // element size at the interface
  double far_factor = 3.0;      // far-field size as a multiple of target_h
  double grading = 0.35;        // growth of the size with distance to the curve
  double min_angle_deg = 25.0;  // refinement angle goal
  std::size_t max_vertices = 200000;
};

inline double distance_to_segment(const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
  const Vec2 d = b - a;
  const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
  return distance(p, a + t * d);
}

/// Constrained Delaunay mesh of the rectangle containing every curve segment
/// as an edge, refined for quality and graded away from the curve.
inline FittedMesh generate_fitted_mesh(const Domain &domain, const GeneratingCurve &curve,
                                       const MeshOptions &opt = {})
{
  if (curve.num_nodes() < 3)
    throw MeshError("interface curve needs at least two segments");
  curve.validate();
  if (!(opt.target_h > 0.0))
    throw MeshError("target_h must be positive");
  for (std::size_t j = 0; j < curve.num_nodes(); ++j) {
    const Vec2 &p = curve.node(j);
    const bool end = j == 0 || j + 1 == curve.num_nodes();
    const bool r_ok = end ? p.r == 0.0 : (p.r > 0.0 && p.r < domain.r_max);
    if (!r_ok || !(p.z > domain.z_min && p.z < domain.z_max))
      throw MeshError("curve node " + std::to_string(j) + " lies outside the domain");
  }

  cdt::Triangulation tri({0.0, domain.z_min}, {domain.r_max, domain.z_max});
  std::vector<int> node_vertex(curve.num_nodes());
  for (std::size_t j = 0; j < curve.num_nodes(); ++j) {
    node_vertex[j] = tri.insert(curve.node(j));
    if (!(tri.points()[node_vertex[j]] == curve.node(j)))
      throw MeshError("curve node moved during insertion");
  }
  for (std::size_t j = 0; j + 1 < curve.num_nodes(); ++j) {
    if (node_vertex[j] == node_vertex[j + 1])
      throw MeshError("duplicate curve nodes");
    tri.constrain_segment(node_vertex[j], node_vertex[j + 1], static_cast<int>(j));
  }

  const double h_far = opt.far_factor * opt.target_h;
  const std::vector<Vec2> &nodes = curve.nodes();
  cdt::RefineOptions ropt;
  ropt.min_angle_deg = opt.min_angle_deg;
  ropt.max_vertices = opt.max_vertices;
  ropt.size = [&](const Vec2 &p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s)
      d = std::min(d, distance_to_segment(p, nodes[s], nodes[s + 1]));
    return std::min(h_far, opt.target_h + opt.grading * d);
  };
  tri.refine(ropt);

  // Compact: keep vertex numbering, drop dead triangles.
  FittedMesh mesh;
  mesh.domain = domain;
  mesh.vertices = tri.points();
  for (int t : tri.alive_triangles()) {
    const auto &v = tri.triangles()[t].v;
    mesh.triangles.push_back({v[0], v[1], v[2]});
  }
  mesh.vertex_sides.assign(mesh.vertices.size(), 0);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec2 &p = mesh.vertices[i];
    std::uint8_t bits = 0;
    if (p.z == domain.z_min)
      bits |= side_bits::bottom;
    if (p.r == domain.r_max)
      bits |= side_bits::right;
    if (p.z == domain.z_max)
      bits |= side_bits::top;
    if (p.r == 0.0)
      bits |= side_bits::axis;
    mesh.vertex_sides[i] = bits;
  }
  mesh.interface_vertex = node_vertex;
  mesh.finalize();

  const double alpha = min_angle(mesh);
  if (alpha < remesh_angle) {
    std::ostringstream msg;
    msg << "mesh generator missed the angle bound: min angle " << alpha * 180.0 / std::numbers::pi
        << " deg with " << mesh.num_vertices() << " vertices and " << mesh.num_triangles()
        << " triangles";
    throw MeshError(msg.str());
  }
  return mesh;
}

/// Bucket grid over triangle bounding boxes for point location.
class PointLocator
{
public:
  explicit PointLocator(const FittedMesh &mesh) : mesh_(&mesh)
  {
    const Domain &d = mesh.domain;
    lo_ = {0.0, d.z_min};
    const double w = d.r_max, h = d.z_max - d.z_min;
    const double cells = std::max(1.0, std::sqrt(static_cast<double>(mesh.num_triangles())));
    nr_ = std::max(1, static_cast<int>(std::ceil(cells * std::sqrt(w / h))));
    nz_ = std::max(1, static_cast<int>(std::ceil(cells * std::sqrt(h / w))));
    dr_ = w / nr_;
    dz_ = h / nz_;
    buckets_.assign(static_cast<std::size_t>(nr_) * nz_, {});
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      Vec2 mn{1e300, 1e300}, mx{-1e300, -1e300};
      for (int v : mesh.triangles[t]) {
        mn.r = std::min(mn.r, mesh.vertices[v].r);
        mn.z = std::min(mn.z, mesh.vertices[v].z);
        mx.r = std::max(mx.r, mesh.vertices[v].r);
        mx.z = std::max(mx.z, mesh.vertices[v].z);
      }
      const auto [i0, j0] = cell(mn);
      const auto [i1, j1] = cell(mx);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
          buckets_[static_cast<std::size_t>(j) * nr_ + i].push_back(static_cast<int>(t));
    }
    snap_ = 1e-10 * d.diameter();
  }

  struct Hit {
    int triangle;
    std::array<double, 3> bary;
  };

  /// Containing triangle and barycentric coordinates. Points just outside
  /// the mesh (within the snap tolerance) are projected onto the nearest
  /// triangle.
  Hit locate(const Vec2 &p) const
  {
    const auto [ci, cj] = cell(p);
    double best = std::numeric_limits<double>::infinity();
    Hit best_hit{-1, {}};
    for (int ring = 0; ring <= 1; ++ring) {
      for (int i = ci - ring; i <= ci + ring; ++i) {
        for (int j = cj - ring; j <= cj + ring; ++j) {
          if (i < 0 || j < 0 || i >= nr_ || j >= nz_)
            continue;
          for (int t : buckets_[static_cast<std::size_t>(j) * nr_ + i]) {
            const auto b = barycentric(t, p);
            const double outside = -std::min({b[0], b[1], b[2]});
            if (outside <= 0.0)
              return {t, b};
            const double dist = distance_to_triangle(t, p);
            if (dist < best) {
              best = dist;
              best_hit = {t, b};
            }
          }
        }
      }
      if (best <= snap_)
        break;
    }
    if (best_hit.triangle < 0 || best > snap_)
      throw MeshError("point location failed beyond the snap tolerance");
    auto &b = best_hit.bary;
    for (double &x : b)
      x = std::max(0.0, x);
    const double s = b[0] + b[1] + b[2];
    for (double &x : b)
      x /= s;
    return best_hit;
  }

private:
  const FittedMesh *mesh_;
  Vec2 lo_;
  int nr_ = 1, nz_ = 1;
  double dr_ = 1, dz_ = 1, snap_ = 0;
  std::vector<std::vector<int>> buckets_;

  std::pair<int, int> cell(const Vec2 &p) const
  {
    const int i = std::clamp(static_cast<int>(std::floor((p.r - lo_.r) / dr_)), 0, nr_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.z - lo_.z) / dz_)), 0, nz_ - 1);
    return {i, j};
  }

  std::array<double, 3> barycentric(int t, const Vec2 &p) const
  {
    const auto &v = mesh_->triangles[t];
    const Vec2 &a = mesh_->vertices[v[0]], &b = mesh_->vertices[v[1]], &c = mesh_->vertices[v[2]];
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    return {1.0 - l1 - l2, l1, l2};
  }

  double distance_to_triangle(int t, const Vec2 &p) const
  {
    const auto &v = mesh_->triangles[t];
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
      d = std::min(d, distance_to_segment(p, mesh_->vertices[v[k]], mesh_->vertices[v[(k + 1) % 3]]));
    return d;
  }
};

} // namespace alefem

#endif
