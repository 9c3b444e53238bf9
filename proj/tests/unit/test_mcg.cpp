#include <doctest.h>

#include <cmath>

#include "teichlab/mcg.hpp"
#include "teichlab/rng.hpp"

using namespace teichlab;
using doctest::Approx;

namespace {

MappingClass random_class(Rng& rng, int len) {
  const MappingClass gens[] = {{1, 1, 0, 1}, {1, -1, 0, 1}, {1, 0, 1, 1}, {1, 0, -1, 1}};
  MappingClass m;
  for (int k = 0; k < len; ++k) m = m * gens[rng.below(4)];
  return m;
}

TorusPoint random_point(Rng& rng) { return {rng.uniform(-1.5, 1.5), std::exp(rng.uniform(-1.0, 1.0))}; }

}  // namespace

TEST_CASE("Nielsen-Thurston type") {
  CHECK(classify({0, -1, 1, 0}) == Classification::Periodic);
  CHECK(classify({1, 1, 0, 1}) == Classification::Reducible);
  CHECK(classify({2, 1, 1, 1}) == Classification::Anosov);
  CHECK(classify(MappingClass::identity()) == Classification::Periodic);
  CHECK(classify({-1, 0, 0, -1}) == Classification::Periodic);
  CHECK(classify({-1, 1, 0, -1}) == Classification::Reducible);
  CHECK(dilatation({2, 1, 1, 1}) == Approx(2.61803399).epsilon(1e-9));
  CHECK(dilatation({1, 1, 0, 1}) == 1.0);
  CHECK(dilatation(MappingClass::identity()) == 1.0);
}

TEST_CASE("torus action contract and isometry") {
  const TorusPoint x(0.3, 1.4);
  CHECK(act_on_point(MappingClass::identity(), x) == x);
  Rng rng(61);
  for (int k = 0; k < 1000; ++k) {
    const MappingClass m = random_class(rng, 6);
    const TorusPoint y = random_point(rng);
    const Slope s = canonicalize_slope(static_cast<std::int64_t>(rng.below(21)) - 10, 1 + rng.below(10));
    REQUIRE(length(act_on_point(m, y), apply_mapping_class_to_slope(m, s)) ==
            Approx(length(y, s)).epsilon(1e-12));
    const TorusPoint z = random_point(rng);
    REQUIRE(thurston_metric_exact(act_on_point(m, y), act_on_point(m, z)) ==
            Approx(thurston_metric_exact(y, z)).epsilon(1e-9));
  }
  // Group action: (gh) x = g (h x)
  for (int k = 0; k < 100; ++k) {
    const MappingClass g = random_class(rng, 4), h = random_class(rng, 4);
    const TorusPoint y = random_point(rng);
    const TorusPoint a = act_on_point(g * h, y), b = act_on_point(g, act_on_point(h, y));
    CHECK(teich_distance(a, b) < 1e-9);
  }
}

TEST_CASE("spectral limits on the torus") {
  const ModelPoint i = TorusPoint(0, 1);
  CHECK(std::abs(spectral_limit(i, {2, 1, 1, 1}, {0, 1}, 40).limit - 2.61803399) <= 1e-3);
  for (const Slope& a : farey_enumerate(5)) {
    CHECK(std::abs(spectral_limit(i, {1, 1, 0, 1}, a, 4800).limit - 1.0) <= 1e-3);
  }
  const SpectralEntry id = spectral_limit(i, MappingClass::identity(), {2, 3}, 20);
  for (std::size_t n = 0; n < id.roots.size(); ++n) {
    CHECK(id.roots[n] == Approx(std::pow(length(TorusPoint(0, 1), Slope{2, 3}), 1.0 / static_cast<double>(n + 1))));
  }
  CHECK(id.limit == 1.0);
}

TEST_CASE("spectral limits on the Fricke model") {
  const ModelPoint x = FrickePoint(3, 3, 3);
  const SpectralEntry e = spectral_limit(x, {2, 1, 1, 1}, {0, 1}, 40);
  CHECK(std::abs(e.limit - dilatation({2, 1, 1, 1})) <= 1e-3);
  // Lengths along the orbit match direct evaluation while it is cheap.
  for (int n = 0; n <= 10; ++n) {
    MappingClass mn;
    for (int k = 0; k < n; ++k) mn = mn * MappingClass(2, 1, 1, 1);
    CHECK(e.logLengths[static_cast<std::size_t>(n)] ==
          Approx(log_hyp_length(FrickePoint(3, 3, 3), apply_mapping_class_to_slope(mn, {0, 1}))).epsilon(1e-12));
  }
}

TEST_CASE("spectral report") {
  const auto anosov = spectral_report(TorusPoint(0, 1), {2, 1, 1, 1}, farey_enumerate(3), 40);
  CHECK(anosov.classification == Classification::Anosov);
  CHECK(anosov.agreesWithDilatation);
  CHECK(anosov.spectrum.size() == 1);
  const auto twist = spectral_report(TorusPoint(0, 1), {1, 1, 0, 1}, farey_enumerate(5), 4800);
  REQUIRE(twist.spectrum.size() == 1);
  CHECK(twist.spectrum[0] == Approx(1.0).epsilon(1e-3));
  CHECK(twist.classification == Classification::Reducible);
  const auto periodic = spectral_report(TorusPoint(0.2, 1.1), {0, -1, 1, 1}, farey_enumerate(3), 4800);
  REQUIRE(periodic.spectrum.size() == 1);
  CHECK(periodic.spectrum[0] == Approx(1.0).epsilon(1e-12));
}
