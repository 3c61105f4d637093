#ifndef ALEFEM_QUADRATURE_HPP
#define ALEFEM_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace alefem
{

/// Barycentric point and weight; weights sum to one over the triangle.
struct TriangleQuadPoint {
  std::array<double, 3> bary;
  double weight;
};

/// 7-point rule on triangles, exact for polynomials of degree 5. All points
/// are interior.
inline const std::array<TriangleQuadPoint, 7> &triangle_rule()
{
  static const std::array<TriangleQuadPoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
    return std::array<TriangleQuadPoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{a1, a1, b1}, w1},
        {{a1, b1, a1}, w1},
        {{b1, a1, a1}, w1},
        {{a2, a2, b2}, w2},
        {{a2, b2, a2}, w2},
        {{b2, a2, a2}, w2},
    }};
  }();
  return rule;
}

/// 3-point rule, exact for degree 2.
inline const std::array<TriangleQuadPoint, 3> &triangle_rule_deg2()
{
  static const std::array<TriangleQuadPoint, 3> rule{{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
  }};
  return rule;
}

struct LineQuadPoint {
  double x; // in [0, 1]
  double weight;
};

/// Gauss-Legendre rule with n points on [0, 1].
inline std::vector<LineQuadPoint> gauss_legendre(int n)
{
  std::vector<LineQuadPoint> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    pts[i] = {0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)};
  }
  return pts;
}

/// Simpson's rule on [0, 1]: nodes 0, 1/2, 1.
inline constexpr std::array<LineQuadPoint, 3> simpson_rule{{{0.0, 1.0 / 6.0}, {0.5, 4.0 / 6.0}, {1.0, 1.0 / 6.0}}};

} // namespace alefem

#endif
