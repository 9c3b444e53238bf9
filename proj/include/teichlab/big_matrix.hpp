#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "teichlab/curves.hpp"
#include "teichlab/mapping_class.hpp"

namespace teichlab {

using BigInt = boost::multiprecision::cpp_int;

struct BigSlope {
  BigInt p;
  BigInt q;
};

BigSlope canonicalize(BigInt p, BigInt q);
BigSlope to_big(const Slope& s);

/// Exact integer 2x2 matrix for products too long for 64-bit entries.
class BigMatrix {
 public:
  BigMatrix() : a_(1), b_(0), c_(0), d_(1) {}
  explicit BigMatrix(const MappingClass& m) : a_(m.a()), b_(m.b()), c_(m.c()), d_(m.d()) {}
  BigMatrix(BigInt a, BigInt b, BigInt c, BigInt d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

  BigMatrix operator*(const BigMatrix& o) const {
    return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
  }
  /// Inverse of a determinant-one matrix.
  BigMatrix inverse() const { return {d_, -b_, -c_, a_}; }
  BigSlope apply(const BigSlope& s) const { return canonicalize(a_ * s.p + b_ * s.q, c_ * s.p + d_ * s.q); }
  BigSlope apply(const Slope& s) const { return apply(to_big(s)); }

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& c() const { return c_; }
  const BigInt& d() const { return d_; }

 private:
  BigInt a_, b_, c_, d_;
};

inline BigSlope canonicalize(BigInt p, BigInt q) {
  if (p == 0 && q == 0) throw InvalidCurve("zero vector is not a curve");
  BigInt g = boost::multiprecision::gcd(p, q);
  if (g < 0) g = -g;
  p /= g;
  q /= g;
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  return {std::move(p), std::move(q)};
}

inline BigSlope to_big(const Slope& s) { return {BigInt(s.p), BigInt(s.q)}; }

}  // namespace teichlab
