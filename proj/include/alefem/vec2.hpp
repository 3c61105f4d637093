#ifndef ALEFEM_VEC2_HPP
#define ALEFEM_VEC2_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace alefem
{

/// Point or vector in the meridian half-plane; `r` is the distance to the
/// symmetry axis, `z` the axial coordinate.
struct Vec2 {
  double r = 0.0;
  double z = 0.0;

  constexpr Vec2 &operator+=(const Vec2 &o)
  {
    r += o.r;
    z += o.z;
    return *this;
  }
  constexpr Vec2 &operator-=(const Vec2 &o)
  {
    r -= o.r;
    z -= o.z;
    return *this;
  }
  constexpr Vec2 &operator*=(double s)
  {
    r *= s;
    z *= s;
    return *this;
  }
  constexpr double operator[](int c) const { return c == 0 ? r : z; }
  constexpr double &operator[](int c) { return c == 0 ? r : z; }

  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
constexpr Vec2 operator-(const Vec2 &a) { return {-a.r, -a.z}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.r / s, a.z / s}; }

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.r * b.r + a.z * b.z; }
constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.r * b.z - a.z * b.r; }
inline double norm(const Vec2 &a) { return std::hypot(a.r, a.z); }
inline double distance(const Vec2 &a, const Vec2 &b) { return norm(a - b); }

/// Quarter-turn used for curve normals: ν = −perp(τ) is the outward normal of
/// the inner phase when the curve runs from the lower to the upper axis point.
constexpr Vec2 perp(const Vec2 &a) { return {-a.z, a.r}; }

// Error hierarchy shared by all modules.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error
{
public:
  using Error::Error;
};

class MeshError : public Error
{
public:
  using Error::Error;
};

class SolverError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

} // namespace alefem

#endif
