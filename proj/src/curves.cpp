#include "teichlab/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace teichlab {

std::int64_t Slope::height() const { return std::max(std::abs(p), std::abs(q)); }

std::string Slope::str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

std::strong_ordering operator<=>(const Slope& s, const Slope& t) {
  return std::make_tuple(s.height(), s.q, s.p) <=> std::make_tuple(t.height(), t.q, t.p);
}

Slope canonicalize_slope(std::int64_t p, std::int64_t q) {
  if (p == 0 && q == 0) throw InvalidCurve("zero vector is not a curve");
  const std::int64_t g = std::gcd(p, q);
  p /= g;
  q /= g;
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  return {p, q};
}

Foliation::Foliation(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || (a == 0.0 && b == 0.0)) {
    throw InvalidCurve("foliation direction must be a finite nonzero vector");
  }
  const double n = std::hypot(a, b);
  a_ = a / n;
  b_ = b / n;
  if (a_ < 0.0 || (a_ == 0.0 && b_ < 0.0)) {
    a_ = -a_;
    b_ = -b_;
  }
  // Avoid a signed zero leaking into output.
  a_ += 0.0;
  b_ += 0.0;
}

Foliation::Foliation(const Slope& s) : Foliation(static_cast<double>(s.p), static_cast<double>(s.q)) {}

double intersection(Vec2 u, Vec2 v) { return std::abs(cross(u, v)); }

std::int64_t intersection(const Slope& s, const Slope& t) {
  const __int128 v = static_cast<__int128>(s.p) * t.q - static_cast<__int128>(s.q) * t.p;
  return static_cast<std::int64_t>(v < 0 ? -v : v);
}

double intersection(const Foliation& u, const Foliation& v) { return intersection(u.vec(), v.vec()); }
double intersection(const Foliation& u, const Slope& s) { return intersection(u.vec(), s.vec()); }
double intersection(const Slope& s, const Foliation& u) { return intersection(u, s); }

std::vector<Slope> farey_enumerate(int maxHeight) {
  if (maxHeight < 1) throw InvalidArgument("maxHeight must be at least 1");
  std::vector<Slope> out;
  out.push_back({1, 0});
  for (std::int64_t h = 1; h <= maxHeight; ++h) {
    std::vector<Slope> layer;
    // Boundary of the box |p|,|q| <= h with q >= 1.
    for (std::int64_t p = -h; p <= h; ++p) {
      if (std::gcd(p, h) == 1) layer.push_back({p, h});
    }
    for (std::int64_t q = 1; q < h; ++q) {
      if (std::gcd(h, q) == 1) {
        layer.push_back({-h, q});
        layer.push_back({h, q});
      }
    }
    std::sort(layer.begin(), layer.end());
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

FareyTriple farey_triple(const Slope& child) {
  const Slope s = canonicalize_slope(child.p, child.q);
  if (s.p == 0 || s.q == 0) {
    throw InvalidCurve("basis slope " + s.str() + " has no Farey parents");
  }
  const bool reflect = s.p < 0;
  const std::int64_t p = std::abs(s.p), q = s.q;
  // Solve a*q - b*p = 1 with 0 < a <= p.
  std::int64_t r0 = q, r1 = p, x0 = 1, x1 = 0;
  while (r1 != 0) {
    const std::int64_t k = r0 / r1;
    std::tie(r0, r1) = std::make_tuple(r1, r0 - k * r1);
    std::tie(x0, x1) = std::make_tuple(x1, x0 - k * x1);
  }
  // x0*q == 1 (mod p)
  std::int64_t a = ((x0 - 1) % p + p) % p + 1;
  const std::int64_t b = static_cast<std::int64_t>((static_cast<__int128>(a) * q - 1) / p);
  Slope pa{a, b}, pb{p - a, q - b};
  Slope co{pa.p - pb.p, pa.q - pb.q};
  if (reflect) {
    pa.p = -pa.p;
    pb.p = -pb.p;
    co.p = -co.p;
  }
  return {s, canonicalize_slope(pa.p, pa.q), canonicalize_slope(pb.p, pb.q),
          canonicalize_slope(co.p, co.q)};
}

Slope apply_mapping_class_to_slope(const MappingClass& m, const Slope& s) {
  const __int128 x = static_cast<__int128>(m.a()) * s.p + static_cast<__int128>(m.b()) * s.q;
  const __int128 y = static_cast<__int128>(m.c()) * s.p + static_cast<__int128>(m.d()) * s.q;
  const __int128 lim = static_cast<__int128>(INT64_MAX);
  if (x > lim || x < -lim || y > lim || y < -lim) {
    throw InvalidCurve("image of " + s.str() + " under " + m.str() + " overflows");
  }
  return canonicalize_slope(static_cast<std::int64_t>(x), static_cast<std::int64_t>(y));
}

Foliation apply_mapping_class_to_foliation(const MappingClass& m, const Foliation& f) {
  const Vec2 v = m.to_mat2() * f.vec();
  return {v.x, v.y};
}

}  // namespace teichlab
