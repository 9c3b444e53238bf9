#include "teichlab/mapping_class.hpp"

#include <sstream>

namespace teichlab {

namespace {

std::int64_t checked_dot(std::int64_t x1, std::int64_t y1, std::int64_t x2, std::int64_t y2) {
  std::int64_t u = 0, v = 0, w = 0;
  if (__builtin_mul_overflow(x1, y1, &u) || __builtin_mul_overflow(x2, y2, &v) ||
      __builtin_add_overflow(u, v, &w)) {
    throw InvalidMappingClass("mapping class product overflows 64-bit entries");
  }
  return w;
}

}  // namespace

MappingClass::MappingClass(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
    : a_(a), b_(b), c_(c), d_(d) {
  const __int128 det = static_cast<__int128>(a) * d - static_cast<__int128>(b) * c;
  if (det != 1) {
    throw InvalidMappingClass("matrix " + str() + " does not have determinant +1");
  }
}

MappingClass MappingClass::inverse() const { return {d_, -b_, -c_, a_}; }

MappingClass MappingClass::operator*(const MappingClass& o) const {
  return {checked_dot(a_, o.a_, b_, o.c_), checked_dot(a_, o.b_, b_, o.d_),
          checked_dot(c_, o.a_, d_, o.c_), checked_dot(c_, o.b_, d_, o.d_)};
}

std::string MappingClass::str() const {
  std::ostringstream os;
  os << "[[" << a_ << "," << b_ << "],[" << c_ << "," << d_ << "]]";
  return os.str();
}

}  // namespace teichlab
