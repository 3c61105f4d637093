#ifndef ALEFEM_TRIANGULATION_HPP
#define ALEFEM_TRIANGULATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "alefem/predicates.hpp"
#include "alefem/vec2.hpp"

// Incremental constrained Delaunay triangulation of an axis-aligned
// rectangle with Delaunay refinement. Internal machinery of the mesh
// generator; FittedMesh is the public product.
namespace alefem::cdt
{

enum class Constraint : std::uint8_t { none, boundary, interface };

/// Rectangle sides, in counter-clockwise order starting at the bottom.
enum class Side : int { bottom = 0, right = 1, top = 2, axis = 3 };

struct Tri {
  std::array<int, 3> v{};                 // counter-clockwise
  std::array<int, 3> nb{-1, -1, -1};      // neighbour across edge i (opposite v[i])
  std::array<Constraint, 3> kind{};       // constraint on edge i
  std::array<int, 3> tag{-1, -1, -1};     // side id or interface segment index
  bool alive = true;
  bool skip = false;                      // refinement gave up on this triangle
};

struct RefineOptions {
  double min_angle_deg = 25.0;
  std::function<double(const Vec2 &)> size; // target edge length at a point
  std::size_t max_vertices = 200000;
};

class Triangulation
{
public:
  Triangulation(Vec2 lo, Vec2 hi) : lo_(lo), hi_(hi)
  {
    if (!(hi.r > lo.r && hi.z > lo.z))
      throw MeshError("degenerate rectangle");
    pts_ = {lo, {hi.r, lo.z}, hi, {lo.r, hi.z}};
    vtri_.assign(4, 0);
    // Two triangles: (0,1,2) and (0,2,3).
    Tri a, b;
    a.v = {0, 1, 2};
    b.v = {0, 2, 3};
    // a: edge0=(1,2) right side, edge1=(2,0) diagonal, edge2=(0,1) bottom.
    a.nb = {-1, 1, -1};
    a.kind = {Constraint::boundary, Constraint::none, Constraint::boundary};
    a.tag = {int(Side::right), -1, int(Side::bottom)};
    // b: edge0=(2,3) top, edge1=(3,0) axis, edge2=(0,2) diagonal.
    b.nb = {-1, -1, 0};
    b.kind = {Constraint::boundary, Constraint::boundary, Constraint::none};
    b.tag = {int(Side::top), int(Side::axis), -1};
    tris_ = {a, b};
    vtri_ = {0, 0, 0, 1};
  }

  const std::vector<Vec2> &points() const { return pts_; }
  const std::vector<Tri> &triangles() const { return tris_; }
  Vec2 lo() const { return lo_; }
  Vec2 hi() const { return hi_; }

  /// Inserts a point strictly inside the rectangle or on its boundary.
  int insert(Vec2 p)
  {
    snap_to_boundary(p);
    const auto loc = locate(p, last_);
    if (!loc)
      throw MeshError("point outside the rectangle");
    if (loc->vertex >= 0)
      return loc->vertex;
    return insert_at(p, *loc);
  }

  /// Marks the straight segment between two existing vertices as an
  /// interface constraint, flipping crossing edges out of the way.
  void constrain_segment(int a, int b, int tag)
  {
    if (auto e = find_edge(a, b)) {
      mark(e->first, e->second, Constraint::interface, tag);
      return;
    }
    std::deque<std::pair<int, int>> crossing = crossing_edges(a, b);
    std::size_t guard = 0;
    std::vector<std::pair<int, int>> created;
    while (!crossing.empty()) {
      if (++guard > 100000)
        throw MeshError("segment recovery did not terminate");
      auto [u, w] = crossing.front();
      crossing.pop_front();
      auto e = find_edge(u, w);
      if (!e)
        continue;
      const auto [t, i] = *e;
      const int n = tris_[t].nb[i];
      if (n < 0 || tris_[t].kind[i] != Constraint::none)
        throw MeshError("interface segment crosses a constrained edge");
      const int x = tris_[t].v[i];
      const int y = opposite_vertex(n, t);
      if (predicates::orient2d(pts_[x], pts_[y], pts_[u]) *
              predicates::orient2d(pts_[x], pts_[y], pts_[w]) <
          0) {
        flip(t, i);
        if (x != a && x != b && y != a && y != b && crosses(a, b, x, y))
          crossing.emplace_back(x, y);
        else
          created.emplace_back(x, y);
      } else {
        crossing.emplace_back(u, w);
      }
    }
    auto e = find_edge(a, b);
    if (!e)
      throw MeshError("segment recovery failed");
    mark(e->first, e->second, Constraint::interface, tag);
    restore_delaunay(created);
  }

  /// Delaunay refinement for the angle bound and the sizing field.
  void refine(const RefineOptions &opt)
  {
    const double min_angle = opt.min_angle_deg * std::numbers::pi / 180.0;
    std::deque<int> queue(tris_.size());
    for (std::size_t t = 0; t < tris_.size(); ++t)
      queue[t] = static_cast<int>(t);

    while (!queue.empty()) {
      if (pts_.size() > opt.max_vertices)
        throw MeshError("mesh refinement exceeded the vertex limit");
      const int t = queue.front();
      queue.pop_front();
      if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive)
        continue;
      if (tris_[t].skip)
        continue;

      // Boundary segments encroached by the apex are split first.
      bool split = false;
      for (int i = 0; i < 3 && !split; ++i) {
        if (tris_[t].kind[i] != Constraint::boundary)
          continue;
        const Vec2 &a = pts_[tris_[t].v[(i + 1) % 3]];
        const Vec2 &b = pts_[tris_[t].v[(i + 2) % 3]];
        const Vec2 &c = pts_[tris_[t].v[i]];
        if (dot(a - c, b - c) < 0.0) {
          split_boundary_edge(t, i, queue);
          split = true;
        }
      }
      if (split)
        continue;

      if (!is_bad(t, min_angle, opt.size))
        continue;

      const Vec2 cc = circumcenter(t);
      auto blocked = first_blocking_segment(t, cc);
      if (!blocked) {
        if (auto loc = locate(cc, t); loc && loc->vertex < 0) {
          blocked = encroached_by(cc, *loc);
          if (!blocked) {
            const int nv = insert_at(cc, *loc);
            enqueue_around(nv, queue);
            continue;
          }
        }
      }
      if (!blocked) {
        tris_[t].skip = true;
        continue;
      }
      const auto [bt, bi] = *blocked;
      if (tris_[bt].kind[bi] == Constraint::boundary) {
        split_boundary_edge(bt, bi, queue);
        queue.push_back(t);
        continue;
      }
      // Interface segments are never split: try the apex of an equilateral
      // triangle on the segment, on the side of the offending triangle.
      if (try_interface_apex(t, bt, bi, queue))
        queue.push_back(t);
      else
        tris_[t].skip = true;
    }
  }

  /// Alive triangles of the current triangulation.
  std::vector<int> alive_triangles() const
  {
    std::vector<int> out;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive)
        out.push_back(static_cast<int>(t));
    return out;
  }

  std::optional<std::pair<int, int>> find_edge(int a, int b) const
  {
    for (int t : triangles_around(a)) {
      const Tri &tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int p = tr.v[(i + 1) % 3], q = tr.v[(i + 2) % 3];
        if ((p == a && q == b) || (p == b && q == a))
          return std::make_pair(t, i);
      }
    }
    return std::nullopt;
  }

private:
  struct Location {
    int tri = -1;
    int edge = -1;   // >= 0 if on that edge
    int vertex = -1; // >= 0 if coincides with a vertex
  };

  Vec2 lo_, hi_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::vector<int> free_;
  int last_ = 0;
  unsigned walk_counter_ = 0;

  void snap_to_boundary(Vec2 &p) const
  {
    const double tol = 1e-14 * std::max(hi_.r - lo_.r, hi_.z - lo_.z);
    if (std::abs(p.r - lo_.r) <= tol)
      p.r = lo_.r;
    if (std::abs(p.r - hi_.r) <= tol)
      p.r = hi_.r;
    if (std::abs(p.z - lo_.z) <= tol)
      p.z = lo_.z;
    if (std::abs(p.z - hi_.z) <= tol)
      p.z = hi_.z;
  }

  bool inside_closed(const Vec2 &p) const
  {
    return p.r >= lo_.r && p.r <= hi_.r && p.z >= lo_.z && p.z <= hi_.z;
  }

  std::optional<Location> locate(const Vec2 &p, int start)
  {
    if (!inside_closed(p))
      return std::nullopt;
    int t = start;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive)
      t = first_alive();
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 100; ++steps) {
      const Tri &tr = tris_[t];
      const unsigned off = walk_counter_++ % 3;
      bool moved = false;
      int zeros = 0, zero_edge = -1;
      for (unsigned k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + off) % 3);
        const int o = predicates::orient2d(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p);
        if (o < 0) {
          if (tr.nb[i] < 0)
            return std::nullopt;
          t = tr.nb[i];
          moved = true;
          break;
        }
        if (o == 0) {
          ++zeros;
          zero_edge = i;
        }
      }
      if (moved)
        continue;
      last_ = t;
      Location loc{t, -1, -1};
      if (zeros == 1)
        loc.edge = zero_edge;
      else if (zeros >= 2) {
        for (int i = 0; i < 3; ++i)
          if (pts_[tr.v[i]] == p)
            loc.vertex = tr.v[i];
        if (loc.vertex < 0)
          throw MeshError("inconsistent point location");
      }
      return loc;
    }
    throw MeshError("point location walk did not terminate");
  }

  int first_alive() const
  {
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive)
        return static_cast<int>(t);
    throw MeshError("empty triangulation");
  }

  int new_tri()
  {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      tris_[t] = Tri{};
      return t;
    }
    tris_.emplace_back();
    return static_cast<int>(tris_.size()) - 1;
  }

  int opposite_vertex(int t, int across_from) const
  {
    const Tri &tr = tris_[t];
    for (int i = 0; i < 3; ++i)
      if (tr.nb[i] == across_from)
        return tr.v[i];
    throw MeshError("broken adjacency");
  }

  int edge_index_to(int t, int nbr) const
  {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].nb[i] == nbr)
        return i;
    return -1;
  }

  bool incircle_tri(int t, const Vec2 &p) const
  {
    const Tri &tr = tris_[t];
    return predicates::incircle(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]], p) > 0;
  }

  int insert_at(const Vec2 &p, const Location &loc)
  {
    const int pv = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);

    // Cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity{loc.tri};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[loc.tri] = 1;
    Constraint split_kind = Constraint::none;
    int split_tag = -1;
    if (loc.edge >= 0) {
      const Tri &tr = tris_[loc.tri];
      split_kind = tr.kind[loc.edge];
      split_tag = tr.tag[loc.edge];
      if (split_kind == Constraint::interface)
        throw MeshError("cannot insert a vertex on an interface segment");
      const int n = tr.nb[loc.edge];
      if (n >= 0) {
        cavity.push_back(n);
        in_cavity[n] = 1;
      }
    }
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri tr = tris_[cavity[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || in_cavity[n] || tr.kind[i] != Constraint::none)
          continue;
        if (incircle_tri(n, p)) {
          in_cavity[n] = 1;
          cavity.push_back(n);
        }
      }
    }

    struct BEdge {
      int a, b, outer;
      Constraint kind;
      int tag;
    };
    std::vector<BEdge> boundary;
    for (int t : cavity) {
      const Tri &tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n >= 0 && in_cavity[n])
          continue;
        boundary.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], n, tr.kind[i], tr.tag[i]});
      }
    }
    for (int t : cavity) {
      tris_[t].alive = false;
      free_.push_back(t);
    }

    std::unordered_map<int, int> by_a, by_b;
    std::vector<int> created;
    for (const BEdge &e : boundary) {
      if (predicates::orient2d(pts_[e.a], pts_[e.b], p) <= 0) {
        if (loc.edge >= 0 && e.outer < 0)
          continue; // the split rectangle edge itself
        throw MeshError("cavity is not star-shaped");
      }
      const int t = new_tri();
      if (static_cast<std::size_t>(t) >= in_cavity.size())
        in_cavity.resize(t + 1, 0);
      Tri &tr = tris_[t];
      tr.v = {e.a, e.b, pv};
      tr.nb = {-1, -1, e.outer};
      tr.kind = {Constraint::none, Constraint::none, e.kind};
      tr.tag = {-1, -1, e.tag};
      if (e.outer >= 0) {
        Tri &o = tris_[e.outer];
        for (int i = 0; i < 3; ++i)
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a)
            o.nb[i] = t;
      }
      by_a[e.a] = t;
      by_b[e.b] = t;
      vtri_[e.a] = t;
      vtri_[e.b] = t;
      created.push_back(t);
    }
    for (int t : created) {
      Tri &tr = tris_[t];
      // edge 0 = (b, p) pairs with the triangle whose a == b.
      if (auto it = by_a.find(tr.v[1]); it != by_a.end())
        tr.nb[0] = it->second;
      else {
        tr.kind[0] = split_kind;
        tr.tag[0] = split_tag;
      }
      // edge 1 = (p, a) pairs with the triangle whose b == a.
      if (auto it = by_b.find(tr.v[0]); it != by_b.end())
        tr.nb[1] = it->second;
      else {
        tr.kind[1] = split_kind;
        tr.tag[1] = split_tag;
      }
    }
    vtri_[pv] = created.front();
    last_ = created.front();
    return pv;
  }

  void flip(int t, int i)
  {
    // t = (x, u, w) with edge i = (u, w), n = (y, w, u).
    const int n = tris_[t].nb[i];
    const int j = edge_index_to(n, t);
    Tri T = tris_[t], N = tris_[n];
    const int x = T.v[i], u = T.v[(i + 1) % 3], w = T.v[(i + 2) % 3];
    const int y = N.v[j];
    // Outer edges: of T: (w,x) = edge (i+1), (x,u) = edge (i+2).
    //              of N: (u,y) = edge (j+1), (y,w) = edge (j+2).
    auto outer = [](const Tri &tr, int e) {
      return std::make_tuple(tr.nb[e], tr.kind[e], tr.tag[e]);
    };
    const auto wx = outer(T, (i + 1) % 3);
    const auto xu = outer(T, (i + 2) % 3);
    const auto uy = outer(N, (j + 1) % 3);
    const auto yw = outer(N, (j + 2) % 3);
    // New t = (x, u, y), new n = (y, w, x).
    Tri &a = tris_[t];
    a.v = {x, u, y};
    a.nb = {std::get<0>(uy), n, std::get<0>(xu)};
    a.kind = {std::get<1>(uy), Constraint::none, std::get<1>(xu)};
    a.tag = {std::get<2>(uy), -1, std::get<2>(xu)};
    Tri &b = tris_[n];
    b.v = {y, w, x};
    b.nb = {std::get<0>(wx), t, std::get<0>(yw)};
    b.kind = {std::get<1>(wx), Constraint::none, std::get<1>(yw)};
    b.tag = {std::get<2>(wx), -1, std::get<2>(yw)};
    auto relink = [this](int outer_t, int from, int to) {
      if (outer_t < 0)
        return;
      for (int k = 0; k < 3; ++k)
        if (tris_[outer_t].nb[k] == from)
          tris_[outer_t].nb[k] = to;
    };
    relink(std::get<0>(uy), n, t);
    relink(std::get<0>(wx), t, n);
    vtri_[x] = t;
    vtri_[u] = t;
    vtri_[y] = t;
    vtri_[w] = n;
  }

  void mark(int t, int i, Constraint kind, int tag)
  {
    tris_[t].kind[i] = kind;
    tris_[t].tag[i] = tag;
    if (const int n = tris_[t].nb[i]; n >= 0) {
      const int j = edge_index_to(n, t);
      tris_[n].kind[j] = kind;
      tris_[n].tag[j] = tag;
    }
  }

  std::vector<int> triangles_around(int a) const
  {
    std::vector<int> out;
    const int start = vtri_[a];
    if (start < 0)
      return out;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      if (std::find(out.begin(), out.end(), t) != out.end())
        continue;
      const Tri &tr = tris_[t];
      if (!tr.alive || std::find(tr.v.begin(), tr.v.end(), a) == tr.v.end())
        continue;
      out.push_back(t);
      for (int i = 0; i < 3; ++i)
        if (tr.nb[i] >= 0 && tr.v[i] != a)
          stack.push_back(tr.nb[i]);
    }
    return out;
  }

  bool crosses(int a, int b, int x, int y) const
  {
    const int o1 = predicates::orient2d(pts_[a], pts_[b], pts_[x]);
    const int o2 = predicates::orient2d(pts_[a], pts_[b], pts_[y]);
    const int o3 = predicates::orient2d(pts_[x], pts_[y], pts_[a]);
    const int o4 = predicates::orient2d(pts_[x], pts_[y], pts_[b]);
    return o1 * o2 < 0 && o3 * o4 < 0;
  }

  std::deque<std::pair<int, int>> crossing_edges(int a, int b) const
  {
    std::deque<std::pair<int, int>> out;
    int t = -1, i = -1;
    for (int s : triangles_around(a)) {
      const Tri &tr = tris_[s];
      const int ia = static_cast<int>(std::find(tr.v.begin(), tr.v.end(), a) - tr.v.begin());
      const int c = tr.v[(ia + 1) % 3], d = tr.v[(ia + 2) % 3];
      const int oc = predicates::orient2d(pts_[a], pts_[c], pts_[b]);
      const int od = predicates::orient2d(pts_[a], pts_[d], pts_[b]);
      if ((oc == 0 && dot(pts_[c] - pts_[a], pts_[b] - pts_[a]) > 0) ||
          (od == 0 && dot(pts_[d] - pts_[a], pts_[b] - pts_[a]) > 0))
        throw MeshError("a mesh vertex lies on an interface segment");
      if (oc > 0 && od < 0) {
        t = s;
        i = ia;
        break;
      }
    }
    if (t < 0)
      throw MeshError("could not start segment recovery");
    for (std::size_t guard = 0; guard < tris_.size() + 10; ++guard) {
      const Tri &tr = tris_[t];
      const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
      out.emplace_back(u, w);
      const int n = tr.nb[i];
      if (n < 0)
        throw MeshError("segment leaves the domain");
      const int e = opposite_vertex(n, t);
      if (e == b)
        return out;
      const int o = predicates::orient2d(pts_[a], pts_[b], pts_[e]);
      if (o == 0)
        throw MeshError("a mesh vertex lies on an interface segment");
      // n = (e, w, u) in some rotation; the next crossing edge is (u,e) or (e,w).
      const Tri &nt = tris_[n];
      const int j = static_cast<int>(std::find(nt.v.begin(), nt.v.end(), e) - nt.v.begin());
      // In n: v[j] = e, v[j+1] = w, v[j+2] = u. Edge opposite v[j+1] is (u, e),
      // edge opposite v[j+2] is (e, w).
      const int ou = predicates::orient2d(pts_[a], pts_[b], pts_[u]);
      t = n;
      i = (o == ou) ? (j + 2) % 3 : (j + 1) % 3;
    }
    throw MeshError("segment walk did not terminate");
  }

  void restore_delaunay(std::vector<std::pair<int, int>> edges)
  {
    std::size_t guard = 0;
    while (!edges.empty()) {
      if (++guard > 1000000)
        throw MeshError("Delaunay restoration did not terminate");
      auto [u, w] = edges.back();
      edges.pop_back();
      auto e = find_edge(u, w);
      if (!e)
        continue;
      const auto [t, i] = *e;
      if (tris_[t].kind[i] != Constraint::none)
        continue;
      const int n = tris_[t].nb[i];
      if (n < 0)
        continue;
      const int y = opposite_vertex(n, t);
      if (!incircle_tri(t, pts_[y]))
        continue;
      const int x = tris_[t].v[i];
      flip(t, i);
      edges.emplace_back(x, u);
      edges.emplace_back(u, y);
      edges.emplace_back(y, w);
      edges.emplace_back(w, x);
    }
  }

  Vec2 circumcenter(int t) const
  {
    const Vec2 &a = pts_[tris_[t].v[0]];
    const Vec2 b = pts_[tris_[t].v[1]] - a;
    const Vec2 c = pts_[tris_[t].v[2]] - a;
    const double d = 2.0 * cross(b, c);
    const double bb = dot(b, b), cc = dot(c, c);
    return a + Vec2{(c.z * bb - b.z * cc) / d, (b.r * cc - c.r * bb) / d};
  }

  bool is_bad(int t, double min_angle, const std::function<double(const Vec2 &)> &size) const
  {
    const Tri &tr = tris_[t];
    const Vec2 &a = pts_[tr.v[0]], &b = pts_[tr.v[1]], &c = pts_[tr.v[2]];
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double lmin = std::min({la, lb, lc});
    const double lmax = std::max({la, lb, lc});
    if (size && lmax > 1.25 * size((a + b + c) / 3.0))
      return true;
    // Smallest angle is opposite the shortest edge.
    const double area2 = std::abs(cross(b - a, c - a));
    const double circum_r = la * lb * lc / (2.0 * area2);
    const double sin_min = lmin / (2.0 * circum_r);
    return sin_min < std::sin(min_angle);
  }

  // Straight walk from the centroid of t to p, returning the first
  // constrained edge crossed on the way.
  std::optional<std::pair<int, int>> first_blocking_segment(int t, const Vec2 &p) const
  {
    const Tri *tr = &tris_[t];
    const Vec2 start = (pts_[tr->v[0]] + pts_[tr->v[1]] + pts_[tr->v[2]]) / 3.0;
    int cur = t, prev = -1;
    for (std::size_t guard = 0; guard < tris_.size() + 10; ++guard) {
      tr = &tris_[cur];
      int exit_edge = -1;
      for (int i = 0; i < 3; ++i) {
        if (tr->nb[i] == prev && prev >= 0)
          continue;
        const Vec2 &u = pts_[tr->v[(i + 1) % 3]];
        const Vec2 &w = pts_[tr->v[(i + 2) % 3]];
        if (predicates::orient2d(u, w, p) < 0 &&
            predicates::orient2d(start, p, u) * predicates::orient2d(start, p, w) <= 0) {
          exit_edge = i;
          break;
        }
      }
      if (exit_edge < 0)
        return std::nullopt; // p inside cur
      if (tr->kind[exit_edge] != Constraint::none || tr->nb[exit_edge] < 0)
        return std::make_pair(cur, exit_edge);
      prev = cur;
      cur = tr->nb[exit_edge];
    }
    return std::nullopt;
  }

  // First constrained edge on the boundary of p's cavity whose diametral
  // circle contains p.
  std::optional<std::pair<int, int>> encroached_by(const Vec2 &p, const Location &loc) const
  {
    std::vector<int> cavity{loc.tri};
    std::vector<char> seen(tris_.size(), 0);
    seen[loc.tri] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri &tr = tris_[cavity[k]];
      for (int i = 0; i < 3; ++i) {
        const Vec2 &u = pts_[tr.v[(i + 1) % 3]];
        const Vec2 &w = pts_[tr.v[(i + 2) % 3]];
        if (tr.kind[i] != Constraint::none) {
          if (dot(u - p, w - p) < 0.0)
            return std::make_pair(cavity[k], i);
          continue;
        }
        const int n = tr.nb[i];
        if (n < 0 || seen[n])
          continue;
        if (incircle_tri(n, p)) {
          seen[n] = 1;
          cavity.push_back(n);
        }
      }
    }
    return std::nullopt;
  }

  void split_boundary_edge(int t, int i, std::deque<int> &queue)
  {
    const Tri &tr = tris_[t];
    const int side = tr.tag[i];
    Vec2 m = 0.5 * (pts_[tr.v[(i + 1) % 3]] + pts_[tr.v[(i + 2) % 3]]);
    switch (static_cast<Side>(side)) {
    case Side::bottom: m.z = lo_.z; break;
    case Side::right: m.r = hi_.r; break;
    case Side::top: m.z = hi_.z; break;
    case Side::axis: m.r = lo_.r; break;
    }
    Location loc{t, i, -1};
    const int nv = insert_at(m, loc);
    enqueue_around(nv, queue);
  }

  bool try_interface_apex(int bad, int st, int si, std::deque<int> &queue)
  {
    const Tri &tr = tris_[st];
    const Vec2 &a = pts_[tr.v[(si + 1) % 3]];
    const Vec2 &b = pts_[tr.v[(si + 2) % 3]];
    const Tri &bt = tris_[bad];
    const Vec2 g = (pts_[bt.v[0]] + pts_[bt.v[1]] + pts_[bt.v[2]]) / 3.0;
    const Vec2 mid = 0.5 * (a + b);
    const Vec2 d = b - a;
    Vec2 n = perp(d) / norm(d);
    if (dot(g - mid, n) < 0.0)
      n = -n;
    const Vec2 p = mid + (0.8660254037844386 * norm(d)) * n;
    const double margin = 1e-9 * std::max(hi_.r - lo_.r, hi_.z - lo_.z);
    if (!(p.r > lo_.r + margin && p.r < hi_.r - margin && p.z > lo_.z + margin &&
          p.z < hi_.z - margin))
      return false;
    if (first_blocking_segment(bad, p))
      return false;
    auto loc = locate(p, bad);
    if (!loc || loc->vertex >= 0 || loc->edge >= 0)
      return false;
    if (encroached_by(p, *loc))
      return false;
    const Tri &host = tris_[loc->tri];
    for (int k = 0; k < 3; ++k)
      if (distance(pts_[host.v[k]], p) < 0.5 * norm(d))
        return false;
    const int nv = insert_at(p, *loc);
    enqueue_around(nv, queue);
    return true;
  }

  void enqueue_around(int v, std::deque<int> &queue) const
  {
    for (int t : triangles_around(v))
      queue.push_back(t);
  }
};

} // namespace alefem::cdt

#endif
