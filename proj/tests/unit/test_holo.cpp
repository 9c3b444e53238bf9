#include <doctest.h>

#include <cmath>
#include <numbers>

#include "teichlab/error.hpp"
#include "teichlab/holo.hpp"
#include "teichlab/rng.hpp"

using namespace teichlab;
using doctest::Approx;

namespace {

const double kHalfLog2 = 0.5 * std::log(2.0);

std::string rotation_about_i(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return "mobius(" + std::to_string(c) + "," + std::to_string(s) + "," + std::to_string(-s) + "," +
         std::to_string(c) + ")";
}

}  // namespace

TEST_CASE("parser") {
  const SelfMap f = SelfMap::parse("mobius(2,0,0,1)");
  CHECK(f(TorusPoint(0, 1)).im() == Approx(2.0));
  const SelfMap g = SelfMap::parse(" shrink(0.5; 0,2) |> mobius(1,1,0,1) ");
  const TorusPoint y = g(TorusPoint(0, 1));
  CHECK(y.re() == Approx(1.0));
  CHECK(y.im() == Approx(1.5));
  const SelfMap b = SelfMap::parse("blaschke(0;1)");
  CHECK(teich_distance(b(TorusPoint(0.3, 0.8)), TorusPoint(0.3, 0.8)) < 1e-12);
  try {
    SelfMap::parse("mobius(2,0,0");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 12);
  }
  CHECK_THROWS_AS(SelfMap::parse("mobius(2,0,0)"), ParseError);
  CHECK_THROWS_AS(SelfMap::parse("warp(1)"), ParseError);
  CHECK_THROWS_AS(SelfMap::parse("mobius(1,0,0,1) |>"), ParseError);
  CHECK_THROWS_AS(SelfMap::parse("mobius(0,1,1,0)"), InvalidArgument);
  CHECK_THROWS_AS(SelfMap::parse("shrink(2;0,0)"), InvalidArgument);
}

TEST_CASE("property: constructed maps are 1-Lipschitz") {
  for (const char* text : {"mobius(2,0,0,1)", "mobius(1,1,0,1)", "shrink(0.5;0,2)", "shrink(0.9;1,0.3)",
                           "blaschke(0.4;2;0.1,-0.3)", "blaschke(1;0;0.5,0.5;-0.2,0.1)",
                           "mobius(3,1,2,1) |> shrink(0.7;0.2,0.5) |> blaschke(0;1;0.3,0)"}) {
    CHECK(SelfMap::parse(text).lipschitz_excess() <= 1e-9);
  }
  // Independent pairs with a different generator.
  const SelfMap f = SelfMap::parse("blaschke(0.4;2;0.1,-0.3) |> shrink(0.8;0.1,0.2)");
  Rng rng(1234);
  for (int k = 0; k < 1000; ++k) {
    const TorusPoint x(rng.uniform(-3, 3), std::exp(rng.uniform(-2, 2)));
    const TorusPoint y(rng.uniform(-3, 3), std::exp(rng.uniform(-2, 2)));
    REQUIRE(teich_distance(f(x), f(y)) <= teich_distance(x, y) + 1e-9);
  }
}

TEST_CASE("drift") {
  const TorusPoint i(0, 1);
  CHECK(std::abs(drift(SelfMap::parse("mobius(2,0,0,1)"), i, 400).value - kHalfLog2) <= 1e-9);
  // Parabolic: d_n = asinh(n/2) grows logarithmically.
  const auto par = drift(SelfMap::parse("mobius(1,1,0,1)"), i, 400);
  CHECK(par.value < 1e-2);
  for (std::size_t n = 0; n < par.distances.size(); ++n) {
    CHECK(par.distances[n] == Approx(std::asinh(static_cast<double>(n) / 2.0)).epsilon(1e-9));
  }
  CHECK(drift(SelfMap::parse(rotation_about_i(0.7)), TorusPoint(0, 2), 400).value <= 1e-3);
}

TEST_CASE("boundary point of the dilation") {
  const SelfMap f = SelfMap::parse("mobius(2,0,0,1)");
  const auto ex = extract_boundary_point(f, TorusPoint(0, 1));
  CHECK(ex.recordsVerified);
  for (const Slope& s : gm_panel()) CHECK(std::abs(ex.point.E(s) - static_cast<double>(std::abs(s.q))) <= 1e-6);
  CHECK(ex.point.E(Slope{1, 0}) < 1e-6);
  CHECK(ex.point.Q(TorusPoint(0, 1)) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("boundary point of the parabolic translation") {
  const SelfMap f = SelfMap::parse("mobius(1,1,0,1)");
  const auto ex = extract_boundary_point(f, TorusPoint(0, 1));
  // E along tau = n + i tends to |q|.
  for (const Slope& s : gm_panel()) CHECK(std::abs(ex.point.E(s) - static_cast<double>(std::abs(s.q))) <= 1e-3);
}

TEST_CASE("bounded orbits have no boundary point") {
  CHECK_THROWS_AS(extract_boundary_point(SelfMap::parse(rotation_about_i(0.7)), TorusPoint(0, 2)), BoundedOrbit);
}

TEST_CASE("growth bound for the dilation") {
  const SelfMap f = SelfMap::parse("mobius(2,0,0,1)");
  const TorusPoint i(0, 1);
  const auto ex = extract_boundary_point(f, i);
  const auto rep = verify_thm4(f, i, ex.point, kHalfLog2, {{0, 1}, {1, 0}, {1, 1}}, 40);
  CHECK(rep.allHold);
  CHECK(rep.lambda == Approx(2.0).epsilon(1e-9));
  CHECK(rep.infRatio == Approx(1.0).epsilon(1e-6));
  CHECK(rep.betas[0].positive);
  CHECK(std::abs(rep.betas[0].minLogMargin) <= 1e-6);  // equality at (0,1)
  CHECK(rep.betas[0].rootAtN == Approx(2.0).epsilon(1e-9));
  CHECK_FALSE(rep.betas[1].positive);
  CHECK(rep.betas[1].rootAtN == Approx(0.5).epsilon(1e-9));
  CHECK(rep.betas[2].converges);
}

TEST_CASE("growth bound for the identity") {
  const SelfMap id = SelfMap::parse("mobius(1,0,0,1)");
  const TorusPoint i(0, 1);
  const GMBoundaryPoint P = gm_boundary_from_ray(Foliation(1, 0), i);
  const auto rep = verify_thm4(id, i, P, 0.0, {{0, 1}, {2, 3}}, 40);
  CHECK(rep.allHold);
  CHECK(rep.lambda == 1.0);
  for (const auto& b : rep.betas) CHECK(b.ratioLimit == Approx(1.0));
}

TEST_CASE("orbit classification") {
  const auto esc = classify_orbit(SelfMap::parse("mobius(2,0,0,1)"), TorusPoint(0, 1));
  CHECK(esc.classification == OrbitClass::Escaping);
  CHECK(std::abs(esc.drift - kHalfLog2) <= 1e-9);
  CHECK(esc.lambdaExt == Approx(2.0).epsilon(1e-9));
  REQUIRE(esc.boundary.has_value());

  const auto shr = classify_orbit(SelfMap::parse("shrink(0.5;0,2)"), TorusPoint(0, 1));
  CHECK(shr.classification == OrbitClass::Bounded);
  CHECK(std::abs(shr.last.re()) <= 1e-6);
  CHECK(std::abs(shr.last.im() - 2.0) <= 1e-6);

  const auto ell = classify_orbit(SelfMap::parse(rotation_about_i(0.7)), TorusPoint(0, 2));
  CHECK(ell.classification == OrbitClass::Bounded);
  CHECK(ell.drift == 0.0);
}

TEST_CASE("step inequality for the dilation") {
  const SelfMap f = SelfMap::parse("mobius(2,0,0,1)");
  const TorusPoint i(0, 1);
  const auto ex = extract_boundary_point(f, i);
  std::vector<TorusPoint> ys;
  for (double v : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) ys.emplace_back(0.0, v);
  const auto rep = verify_step_inequality(f, i, ex.point, kHalfLog2, ys);
  CHECK(rep.allHold);
  for (const auto& p : rep.points) {
    CHECK(p.hy == Approx(-0.5 * std::log(p.y.im())).epsilon(1e-9));
    CHECK(std::abs(p.hfy - (p.hy - kHalfLog2)) <= 1e-9);
    CHECK(std::abs(p.gain - std::sqrt(2.0)) <= 1e-9);
  }
  CHECK(rep.supported == "e^l");
  CHECK_FALSE(rep.gainAtLeastExp2L);
  // Isometry with l = 0 reduces to h(f y) <= h(y).
  const SelfMap rot = SelfMap::parse(rotation_about_i(0.3));
  const auto iso = verify_step_inequality(rot, i, ex.point, 0.0, {TorusPoint(0, 1)});
  CHECK(iso.points[0].hfy <= iso.points[0].hy + 1e-6);
}
