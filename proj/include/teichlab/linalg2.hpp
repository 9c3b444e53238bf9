#pragma once

// Small fixed-size linear algebra for 2x2 forms and matrices. Everything here
// is closed-form; nothing allocates.

#include <algorithm>
#include <cmath>

namespace teichlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
/// Oriented area det[u v].
inline double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

/// Row-major [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 transpose() const { return {a, c, b, d}; }
  /// Adjugate; equals the inverse when det = 1.
  Mat2 adj() const { return {d, -b, -c, a}; }
  double det() const { return a * d - b * c; }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
};

/// Symmetric bilinear form [[xx, xy], [xy, yy]].
struct SymForm {
  double xx = 1.0, xy = 0.0, yy = 1.0;

  double operator()(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
  double det() const { return xx * yy - xy * xy; }
  /// M^T * this * M.
  SymForm pullback(const Mat2& m) const {
    const double p = xx * m.a + xy * m.c, q = xx * m.b + xy * m.d;
    const double r = xy * m.a + yy * m.c, s = xy * m.b + yy * m.d;
    return {m.a * p + m.c * r, m.a * q + m.c * s, m.b * q + m.d * s};
  }
};

struct SymEigen {
  double top = 0.0;
  double bottom = 0.0;
  Vec2 top_vector;  // unit
};

/// Eigen-decomposition of a symmetric 2x2 matrix without cancellation in the
/// discriminant.
inline SymEigen sym_eigen(const SymForm& s) {
  const double mean = 0.5 * (s.xx + s.yy);
  const double half = 0.5 * (s.xx - s.yy);
  const double radius = std::hypot(half, s.xy);
  SymEigen e;
  e.top = mean + radius;
  e.bottom = mean - radius;
  // Eigenvector for the top eigenvalue, picking the better-conditioned row.
  Vec2 v;
  if (half >= 0.0) {
    v = {half + radius, s.xy};
  } else {
    v = {s.xy, radius - half};
  }
  const double n = norm(v);
  e.top_vector = n > 0.0 ? Vec2{v.x / n, v.y / n} : Vec2{1.0, 0.0};
  return e;
}

/// Largest generalized eigenvalue of the pencil (a, b), i.e.
/// max_v a(v) / b(v), with b positive definite. Reduces through the Cholesky
/// factor of b, so b should be reasonably conditioned.
inline double max_generalized_eigenvalue(const SymForm& a, const SymForm& b) {
  const double l11 = std::sqrt(b.xx);
  const double l21 = b.xy / l11;
  const double l22 = std::sqrt(b.yy - l21 * l21);
  // C = L^{-1} A L^{-T}
  const double c11 = a.xx / (l11 * l11);
  const double c12 = (a.xy - l21 * a.xx / l11) / (l11 * l22);
  const double c22 = (a.yy - 2.0 * l21 * a.xy / l11 + l21 * l21 * a.xx / (l11 * l11)) / (l22 * l22);
  return sym_eigen({c11, c12, c22}).top;
}

struct Svd2 {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  Vec2 right1;  // unit top right-singular vector
};

/// Singular values and top right-singular vector of a 2x2 matrix.
inline Svd2 svd2(const Mat2& m) {
  const SymForm gram{m.a * m.a + m.c * m.c, m.a * m.b + m.c * m.d, m.b * m.b + m.d * m.d};
  const SymEigen e = sym_eigen(gram);
  Svd2 out;
  out.sigma1 = std::sqrt(std::max(e.top, 0.0));
  // sigma1 * sigma2 = |det| is better conditioned than the small eigenvalue.
  out.sigma2 = out.sigma1 > 0.0 ? std::abs(m.det()) / out.sigma1 : 0.0;
  out.right1 = e.top_vector;
  return out;
}

/// Angle between two projective directions, in [0, pi/2].
inline double projective_angle(Vec2 u, Vec2 v) {
  const double s = std::abs(cross(u, v));
  const double c = std::abs(dot(u, v));
  return std::atan2(s, c);
}

}  // namespace teichlab
