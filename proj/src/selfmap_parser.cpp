#include <cctype>
#include <charconv>
#include <string>

#include "teichlab/error.hpp"
#include "teichlab/holo.hpp"

namespace teichlab {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::vector<Primitive> map() {
    std::vector<Primitive> out;
    out.push_back(prim());
    skip();
    while (pos_ < s_.size()) {
      if (s_.compare(pos_, 2, "|>") != 0) fail("expected '|>' or end of input");
      pos_ += 2;
      out.push_back(prim());
      skip();
    }
    return out;
  }

 private:
  using Groups = std::vector<std::vector<double>>;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected a primitive name");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t d = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - d;
    };
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
    std::size_t mant = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      mant += digits();
    }
    if (mant == 0) {
      pos_ = start;
      fail("expected a number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    const char* first = s_.data() + start;
    if (*first == '+') ++first;
    double v = 0.0;
    const auto res = std::from_chars(first, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("number out of range");
    }
    return v;
  }

  Groups groups() {
    Groups out(1);
    out.back().push_back(number());
    for (;;) {
      skip();
      if (pos_ >= s_.size()) fail("expected ',', ';' or ')'");
      const char c = s_[pos_];
      if (c == ')') {
        ++pos_;
        return out;
      }
      if (c == ',') {
        ++pos_;
        out.back().push_back(number());
      } else if (c == ';') {
        ++pos_;
        out.emplace_back();
        out.back().push_back(number());
      } else {
        fail("expected ',', ';' or ')'");
      }
    }
  }

  Primitive prim() {
    skip();
    const std::size_t at = pos_;
    const std::string name = ident();
    expect('(');
    const Groups g = groups();
    auto arity = [&](bool ok, const char* shape) {
      if (!ok) throw ParseError(name + " expects " + shape, at);
    };
    if (name == "mobius") {
      arity(g.size() == 1 && g[0].size() == 4, "(a,b,c,d)");
      return MobiusPrim{g[0][0], g[0][1], g[0][2], g[0][3]};
    }
    if (name == "shrink") {
      arity(g.size() == 2 && g[0].size() == 1 && g[1].size() == 2, "(s;re,im)");
      return ShrinkPrim{g[0][0], {g[1][0], g[1][1]}};
    }
    if (name == "blaschke") {
      arity(g[0].size() == 1, "(theta; k; re,im; ...)");
      BlaschkePrim b;
      b.theta = g[0][0];
      if (g.size() > 1) {
        arity(g[1].size() == 1 && g[1][0] >= 0.0 && g[1][0] == static_cast<int>(g[1][0]),
              "a nonnegative integer power");
        b.power = static_cast<int>(g[1][0]);
      }
      for (std::size_t k = 2; k < g.size(); ++k) {
        arity(g[k].size() == 2, "zeros as re,im pairs");
        b.zeros.emplace_back(g[k][0], g[k][1]);
      }
      return b;
    }
    throw ParseError("unknown primitive '" + name + "'", at);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Primitive> parse_selfmap(const std::string& text) { return Parser(text).map(); }

}  // namespace teichlab
