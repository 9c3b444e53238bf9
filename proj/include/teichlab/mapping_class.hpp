#pragma once

#include <cstdint>
#include <string>

#include "teichlab/error.hpp"
#include "teichlab/linalg2.hpp"

namespace teichlab {

/// Unimodular integer matrix [[a, b], [c, d]], ad - bc = 1.
class MappingClass {
 public:
  MappingClass() = default;
  MappingClass(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

  static MappingClass identity() { return {}; }

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  std::int64_t c() const { return c_; }
  std::int64_t d() const { return d_; }

  std::int64_t trace() const { return a_ + d_; }
  MappingClass inverse() const;
  /// Throws InvalidMappingClass when an entry would overflow.
  MappingClass operator*(const MappingClass& o) const;
  bool operator==(const MappingClass&) const = default;

  Mat2 to_mat2() const {
    return {static_cast<double>(a_), static_cast<double>(b_), static_cast<double>(c_),
            static_cast<double>(d_)};
  }
  std::string str() const;

 private:
  std::int64_t a_ = 1, b_ = 0, c_ = 0, d_ = 1;
};

}  // namespace teichlab
