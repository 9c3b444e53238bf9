#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "teichlab/linalg2.hpp"
#include "teichlab/mapping_class.hpp"

namespace teichlab {

/// Primitive integer slope with canonical sign (q > 0, or q = 0 and p = 1).
struct Slope {
  std::int64_t p = 1;
  std::int64_t q = 0;

  std::int64_t height() const;
  Vec2 vec() const { return {static_cast<double>(p), static_cast<double>(q)}; }
  std::string str() const;

  bool operator==(const Slope&) const = default;
};

/// Enumeration order: height, then q, then p.
std::strong_ordering operator<=>(const Slope& s, const Slope& t);

Slope canonicalize_slope(std::int64_t p, std::int64_t q);

/// Projective direction, unit length, first nonzero coordinate positive.
class Foliation {
 public:
  Foliation() = default;
  Foliation(double a, double b);
  explicit Foliation(const Slope& s);

  double a() const { return a_; }
  double b() const { return b_; }
  Vec2 vec() const { return {a_, b_}; }

 private:
  double a_ = 1.0;
  double b_ = 0.0;
};

/// |det[u v]| of representatives.
double intersection(Vec2 u, Vec2 v);
std::int64_t intersection(const Slope& s, const Slope& t);
double intersection(const Foliation& u, const Foliation& v);
double intersection(const Foliation& u, const Slope& s);
double intersection(const Slope& s, const Foliation& u);

std::vector<Slope> farey_enumerate(int maxHeight);

struct FareyTriple {
  Slope child;
  Slope parentA;
  Slope parentB;
  Slope coparent;
};

/// Farey parents of a slope other than (1,0) and (0,1).
FareyTriple farey_triple(const Slope& child);

Slope apply_mapping_class_to_slope(const MappingClass& m, const Slope& s);
Foliation apply_mapping_class_to_foliation(const MappingClass& m, const Foliation& f);

}  // namespace teichlab
