#ifndef ALEFEM_PREDICATES_HPP
#define ALEFEM_PREDICATES_HPP

#include <cmath>

#include <gmpxx.h>

#include "alefem/vec2.hpp"

// Orientation and in-circle signs with a floating-point filter and an exact
// rational fallback when the filter cannot certify the sign.
namespace alefem::predicates
{

namespace detail
{
inline constexpr double eps = 1.1102230246251565e-16; // 2^-53
inline constexpr double ccw_bound = (3.0 + 16.0 * eps) * eps;
inline constexpr double icc_bound = (10.0 + 96.0 * eps) * eps;

inline int sign_of(const mpq_class &v) { return sgn(v); }

inline int orient_exact(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const mpq_class ax(a.r), ay(a.z), bx(b.r), by(b.z), cx(c.r), cy(c.z);
  const mpq_class det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sign_of(det);
}

inline int incircle_exact(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
{
  const mpq_class adx = mpq_class(a.r) - mpq_class(d.r);
  const mpq_class ady = mpq_class(a.z) - mpq_class(d.z);
  const mpq_class bdx = mpq_class(b.r) - mpq_class(d.r);
  const mpq_class bdy = mpq_class(b.z) - mpq_class(d.z);
  const mpq_class cdx = mpq_class(c.r) - mpq_class(d.r);
  const mpq_class cdy = mpq_class(c.z) - mpq_class(d.z);
  const mpq_class alift = adx * adx + ady * ady;
  const mpq_class blift = bdx * bdx + bdy * bdy;
  const mpq_class clift = cdx * cdx + cdy * cdy;
  const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}
} // namespace detail

/// +1 if a, b, c are in counter-clockwise order, -1 if clockwise, 0 if collinear.
inline int orient2d(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const double left = (b.r - a.r) * (c.z - a.z);
  const double right = (b.z - a.z) * (c.r - a.r);
  const double det = left - right;
  const double bound = detail::ccw_bound * (std::abs(left) + std::abs(right));
  if (det > bound)
    return 1;
  if (-det > bound)
    return -1;
  return detail::orient_exact(a, b, c);
}

/// +1 if d lies strictly inside the circumcircle of the counter-clockwise
/// triangle abc, -1 if outside, 0 if cocircular.
inline int incircle(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
{
  const double adx = a.r - d.r, ady = a.z - d.z;
  const double bdx = b.r - d.r, bdy = b.z - d.z;
  const double cdx = c.r - d.r, cdy = c.z - d.z;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det =
      alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = detail::icc_bound * permanent;
  if (det > bound)
    return 1;
  if (-det > bound)
    return -1;
  return detail::incircle_exact(a, b, c, d);
}

} // namespace alefem::predicates

#endif
