#ifndef ALEFEM_CURVE_HPP
#define ALEFEM_CURVE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "alefem/vec2.hpp"

namespace alefem
{

using CurveScalarField = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Polygonal generating curve X : [0,1] -> half-plane, nodes at α_j = j/J.
/// Segment s joins nodes s and s+1. Both end points lie on the axis.
class GeneratingCurve
{
public:
  GeneratingCurve() = default;

  explicit GeneratingCurve(std::vector<Vec2> nodes) : nodes_(std::move(nodes))
  {
    validate();
  }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_segments() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }
  double h() const { return 1.0 / static_cast<double>(num_segments()); }

  const std::vector<Vec2> &nodes() const { return nodes_; }
  const Vec2 &node(std::size_t j) const { return nodes_[j]; }
  Vec2 chord_vector(std::size_t s) const { return nodes_[s + 1] - nodes_[s]; }
  double chord(std::size_t s) const { return norm(chord_vector(s)); }

  GeneratingCurve reversed() const
  {
    std::vector<Vec2> n(nodes_.rbegin(), nodes_.rend());
    return GeneratingCurve(std::move(n));
  }

  void validate() const
  {
    if (nodes_.size() < 2)
      throw GeometryError("generating curve needs at least two nodes");
    if (nodes_.front().r != 0.0 || nodes_.back().r != 0.0)
      throw GeometryError("curve end points must lie on the axis (r = 0)");
    for (std::size_t j = 1; j + 1 < nodes_.size(); ++j)
      if (!(nodes_[j].r > 0.0))
        throw GeometryError("interior curve node " + std::to_string(j) +
                            " has non-positive radius");
    for (std::size_t s = 0; s + 1 < nodes_.size(); ++s)
      if (!(chord(s) > 0.0))
        throw GeometryError("zero-length segment " + std::to_string(s));
  }

private:
  std::vector<Vec2> nodes_;
};

/// Unit tangent and outward unit normal on segment `s`.
inline std::pair<Vec2, Vec2> tangent_normal(const GeneratingCurve &curve, std::size_t s)
{
  const Vec2 d = curve.chord_vector(s);
  const double len = norm(d);
  if (!(len > 0.0))
    throw GeometryError("zero-length segment " + std::to_string(s));
  const Vec2 tau = d / len;
  return {tau, -perp(tau)};
}

inline double surface_area(const GeneratingCurve &curve)
{
  double a = 0.0;
  for (std::size_t s = 0; s < curve.num_segments(); ++s)
    a += 0.5 * (curve.node(s).r + curve.node(s + 1).r) * curve.chord(s);
  return 2.0 * std::numbers::pi * a;
}

inline double enclosed_volume(const GeneratingCurve &curve)
{
  // (ν·e1)|X_α| dα = d_z ds on each segment.
  double v = 0.0;
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    const double r0 = curve.node(s).r;
    const double r1 = curve.node(s + 1).r;
    v += curve.chord_vector(s).z * (r0 * r0 + r0 * r1 + r1 * r1) / 3.0;
  }
  return std::numbers::pi * v;
}

inline double equidistribution_ratio(const GeneratingCurve &curve)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    const double c = curve.chord(s);
    if (!(c > 0.0))
      throw GeometryError("zero-length segment " + std::to_string(s));
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return hi / lo;
}

/// Semicircle of radius R about (0, zc) sampled at uniform polar angle,
/// running from the lower pole to the upper pole.
inline GeneratingCurve make_semicircle(double zc, double R, std::size_t segments)
{
  std::vector<Vec2> nodes(segments + 1);
  for (std::size_t j = 0; j <= segments; ++j) {
    const double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(segments);
    nodes[j] = {R * std::sin(th), zc - R * std::cos(th)};
  }
  nodes.front().r = 0.0;
  nodes.back().r = 0.0;
  return GeneratingCurve(std::move(nodes));
}

/// Vector weight field on the curve, linear in α on every segment.
///
/// Stored as the density with respect to the local segment coordinate
/// s ∈ [0,1], i.e. values of h·f at both segment ends. For the plain field
/// f = (X·e1)|X_α|ν, and for the time-weighted f^{m+1/2} the densities are
/// assembled from both curves.
struct NormalField {
  std::vector<std::array<Vec2, 2>> ends;

  Vec2 at(std::size_t s, double t) const
  {
    return (1.0 - t) * ends[s][0] + t * ends[s][1];
  }
  std::size_t num_segments() const { return ends.size(); }
};

inline NormalField plain_normal_field(const GeneratingCurve &curve)
{
  NormalField f;
  f.ends.resize(curve.num_segments());
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    const Vec2 dp = perp(curve.chord_vector(s));
    f.ends[s] = {-curve.node(s).r * dp, -curve.node(s + 1).r * dp};
  }
  return f;
}

using TimeWeightedNormalField = NormalField;

inline TimeWeightedNormalField time_weighted_normal(const GeneratingCurve &old_curve,
                                                    const GeneratingCurve &new_curve)
{
  if (old_curve.num_nodes() != new_curve.num_nodes())
    throw GeometryError("time-weighted normal needs curves with equal node count");
  TimeWeightedNormalField f;
  f.ends.resize(old_curve.num_segments());
  for (std::size_t s = 0; s < old_curve.num_segments(); ++s) {
    const Vec2 d0 = old_curve.chord_vector(s);
    const Vec2 d1 = new_curve.chord_vector(s);
    for (int e = 0; e < 2; ++e) {
      const double r0 = old_curve.node(s + e).r;
      const double r1 = new_curve.node(s + e).r;
      const Vec2 sum = 2.0 * r0 * d0 + 2.0 * r1 * d1 + r0 * d1 + r1 * d0;
      f.ends[s][e] = -(1.0 / 6.0) * perp(sum);
    }
  }
  return f;
}

/// ⟨V, f⟩ = ∫_I V·f dα for a piecewise linear nodal vector field V.
inline double pair_with_field(std::span<const Vec2> v, const NormalField &f)
{
  // ∫_0^1 (v0(1-t)+v1 t)·(g0(1-t)+g1 t) dt
  double acc = 0.0;
  for (std::size_t s = 0; s < f.num_segments(); ++s) {
    const Vec2 &v0 = v[s];
    const Vec2 &v1 = v[s + 1];
    const Vec2 &g0 = f.ends[s][0];
    const Vec2 &g1 = f.ends[s][1];
    acc += (2.0 * dot(v0, g0) + dot(v0, g1) + dot(v1, g0) + 2.0 * dot(v1, g1)) / 6.0;
  }
  return acc;
}

/// Reduced numbering of vector curve unknowns: the radial component of both
/// axis end points is eliminated.
class CurveDofMap
{
public:
  explicit CurveDofMap(std::size_t num_nodes = 0) : nodes_(num_nodes)
  {
    index_.assign(2 * num_nodes, -1);
    int next = 0;
    for (std::size_t k = 0; k < num_nodes; ++k)
      for (int c = 0; c < 2; ++c)
        if (!(c == 0 && (k == 0 || k + 1 == num_nodes)))
          index_[2 * k + c] = next++;
    size_ = next;
  }

  int vector_index(std::size_t node, int comp) const { return index_[2 * node + comp]; }
  int num_vector_dofs() const { return size_; }
  int num_scalar_dofs() const { return static_cast<int>(nodes_); }
  std::size_t num_nodes() const { return nodes_; }

  Eigen::VectorXd pack(std::span<const Vec2> v) const
  {
    Eigen::VectorXd out(size_);
    for (std::size_t k = 0; k < nodes_; ++k)
      for (int c = 0; c < 2; ++c)
        if (int i = vector_index(k, c); i >= 0)
          out[i] = v[k][c];
    return out;
  }

  std::vector<Vec2> unpack(const Eigen::VectorXd &x) const
  {
    std::vector<Vec2> out(nodes_);
    for (std::size_t k = 0; k < nodes_; ++k)
      for (int c = 0; c < 2; ++c)
        if (int i = vector_index(k, c); i >= 0)
          out[k][c] = x[i];
    return out;
  }

private:
  std::size_t nodes_ = 0;
  int size_ = 0;
  std::vector<int> index_;
};

enum class CurvatureMode { stab, equi };
enum class NormalChoice { plain, time_weighted };

/// Curve-side blocks of the coupled system, in CurveDofMap numbering.
///   A      : vector × vector stiffness.
///   N      : vector × scalar pairing ⟨ζ, η·f⟩ (kinematic coupling).
///   N_curv : vector × scalar block of the curvature equation.
struct CurveBlocks {
  SpMat A;
  SpMat N;
  SpMat N_curv;
};

/// Matrix of ∫ φ_j (η_k·f) dα, rows = vector unknowns, cols = scalar unknowns.
inline SpMat assemble_normal_pairing(const GeneratingCurve &curve, const NormalField &f,
                                     const CurveDofMap &map)
{
  Triplets trip;
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    // ∫ φ_a φ_b (g0(1-t) + g1 t) dt, a,b ∈ {0,1} local.
    const Vec2 &g0 = f.ends[s][0];
    const Vec2 &g1 = f.ends[s][1];
    const std::array<std::array<Vec2, 2>, 2> m = {{
        {(3.0 * g0 + g1) / 12.0, (g0 + g1) / 12.0},
        {(g0 + g1) / 12.0, (g0 + 3.0 * g1) / 12.0},
    }};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          if (int row = map.vector_index(s + a, c); row >= 0)
            trip.emplace_back(row, static_cast<int>(s + b), m[a][b][c]);
  }
  SpMat out(map.num_vector_dofs(), map.num_scalar_dofs());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

inline CurveBlocks curve_blocks(const GeneratingCurve &curve, CurvatureMode mode,
                                NormalChoice normal, const NormalField *time_weighted = nullptr)
{
  curve.validate();
  const CurveDofMap map(curve.num_nodes());
  const std::size_t nseg = curve.num_segments();
  CurveBlocks blocks;

  Triplets trip;
  for (std::size_t s = 0; s < nseg; ++s) {
    const double len = curve.chord(s);
    const double w = mode == CurvatureMode::stab
                         ? 0.5 * (curve.node(s).r + curve.node(s + 1).r) / len
                         : 1.0 / len;
    for (int c = 0; c < 2; ++c) {
      const int i0 = map.vector_index(s, c);
      const int i1 = map.vector_index(s + 1, c);
      if (i0 >= 0)
        trip.emplace_back(i0, i0, w);
      if (i1 >= 0)
        trip.emplace_back(i1, i1, w);
      if (i0 >= 0 && i1 >= 0) {
        trip.emplace_back(i0, i1, -w);
        trip.emplace_back(i1, i0, -w);
      }
    }
  }
  blocks.A.resize(map.num_vector_dofs(), map.num_vector_dofs());
  blocks.A.setFromTriplets(trip.begin(), trip.end());

  const NormalField plain = plain_normal_field(curve);
  const NormalField &kin =
      normal == NormalChoice::time_weighted && time_weighted ? *time_weighted : plain;
  blocks.N = assemble_normal_pairing(curve, kin, map);

  if (mode == CurvatureMode::stab) {
    blocks.N_curv = blocks.N;
  } else {
    // Mass-lumped ⟨κν, η|X_α|⟩^h: one-sided normals at each node.
    trip.clear();
    for (std::size_t k = 0; k < curve.num_nodes(); ++k) {
      Vec2 w{};
      if (k > 0)
        w += 0.5 * (-perp(curve.chord_vector(k - 1)));
      if (k < nseg)
        w += 0.5 * (-perp(curve.chord_vector(k)));
      for (int c = 0; c < 2; ++c)
        if (int row = map.vector_index(k, c); row >= 0)
          trip.emplace_back(row, static_cast<int>(k), w[c]);
    }
    blocks.N_curv.resize(map.num_vector_dofs(), map.num_scalar_dofs());
    blocks.N_curv.setFromTriplets(trip.begin(), trip.end());
  }
  return blocks;
}

/// ⟨η·e1, |Y_α|⟩ for every vector unknown η, with Y the lagged curve.
inline Eigen::VectorXd radial_length_load(const GeneratingCurve &lagged, const CurveDofMap &map)
{
  Eigen::VectorXd b = Eigen::VectorXd::Zero(map.num_vector_dofs());
  for (std::size_t s = 0; s < lagged.num_segments(); ++s) {
    const double half = 0.5 * lagged.chord(s);
    for (std::size_t k : {s, s + 1})
      if (int i = map.vector_index(k, 0); i >= 0)
        b[i] += half;
  }
  return b;
}

} // namespace alefem

#endif
