#include <doctest.h>

#include <cmath>
#include <numbers>

#include "teichlab/cocycle.hpp"
#include "teichlab/error.hpp"
#include "teichlab/rng.hpp"

using namespace teichlab;
using doctest::Approx;

namespace {

const MappingClass kA(2, 1, 1, 1);
const MappingClass kT1(1, 2, 0, 1), kT2(1, 0, 2, 1);

CocycleSpec iid(std::vector<MappingClass> gens, std::uint64_t seed = 1) {
  CocycleSpec s;
  IidSource src;
  src.weights.assign(gens.size(), 1.0 / static_cast<double>(gens.size()));
  src.generators = std::move(gens);
  s.source = src;
  s.seed = seed;
  return s;
}

// log of the top singular value, from the Frobenius norm and det = 1.
double log_sigma1(long double a, long double b, long double c, long double d, long double logScale) {
  const long double f = a * a + b * b + c * c + d * d;
  const long double det = a * d - b * c;
  const long double s1sq = 0.5L * (f + std::sqrt(std::max(0.0L, f * f - 4.0L * det * det)));
  return static_cast<double>(logScale + 0.5L * std::log(s1sq));
}

// (1/n) log ||Z_n|| with renormalised long double products.
double norm_growth(const std::vector<MappingClass>& word) {
  long double a = 1, b = 0, c = 0, d = 1, s = 0;
  for (const auto& g : word) {
    const long double na = a * g.a() + b * g.c(), nb = a * g.b() + b * g.d();
    const long double nc = c * g.a() + d * g.c(), nd = c * g.b() + d * g.d();
    const long double m = std::max({std::abs(na), std::abs(nb), std::abs(nc), std::abs(nd)});
    a = na / m, b = nb / m, c = nc / m, d = nd / m;
    s += std::log(m);
  }
  return log_sigma1(a, b, c, d, s) / static_cast<double>(word.size());
}

MappingClass random_class(Rng& rng, int len) {
  const MappingClass gens[] = {{1, 1, 0, 1}, {1, -1, 0, 1}, {1, 0, 1, 1}, {1, 0, -1, 1}};
  MappingClass m;
  for (int k = 0; k < len; ++k) m = m * gens[rng.below(4)];
  return m;
}

}  // namespace

TEST_CASE("source validation") {
  CocycleSpec bad = iid({kA, kA});
  std::get<IidSource>(bad.source).weights = {0.7, 0.7};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CocycleSpec m;
  m.source = MarkovSource{{{0.5, 0.5}, {1.0}}, {kT1, kT2}};
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  CocycleSpec r;
  r.source = RotationSource{1.5, {0.5}, {kT1, kT2}};
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  CHECK(golden_angle() == Approx((std::sqrt(5.0) - 1.0) / 2.0));
}

TEST_CASE("identity cocycle") {
  const auto spec = iid({MappingClass::identity()});
  const auto r = sample_trajectory(spec, 10, TorusPoint(0, 1));
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(r.products[k].exact_value() == MappingClass::identity());
    CHECK(r.forward[k] == 0.0);
    CHECK(r.backward[k] == 0.0);
  }
  CHECK(drift_estimate(spec, TorusPoint(0, 1), 50, 10).value == 0.0);
  CHECK_THROWS_AS(estimate_stable_foliation(r), InsufficientGap);
  const auto hd = horo_drift_verify(r, Foliation(1, 0), TorusPoint(0, 1));
  for (double v : hd.values) CHECK(v == 0.0);
}

TEST_CASE("replay is bit-identical") {
  const auto spec = iid({kT1, kT2}, 99);
  const auto a = sample_trajectory(spec, 300, TorusPoint(0.1, 1.2), 7);
  const auto b = sample_trajectory(spec, 300, TorusPoint(0.1, 1.2), 7);
  CHECK(a.increments == b.increments);
  CHECK(a.forward == b.forward);
  CHECK(a.backward == b.backward);
  const auto e1 = drift_estimate(spec, TorusPoint(0, 1), 200, 64, 1);
  const auto e4 = drift_estimate(spec, TorusPoint(0, 1), 200, 64, 4);
  CHECK(e1.perTrial == e4.perTrial);
  CHECK(e1.value == e4.value);
  CHECK(e1.stderr_ == e4.stderr_);
}

TEST_CASE("torus orbit metric equals log of the top singular value") {
  const auto spec = iid({kT1, kT2, kA, kA.inverse()}, 3);
  const auto r = sample_trajectory(spec, 400, TorusPoint(0, 1));
  long double a = 1, b = 0, c = 0, d = 1, s = 0;
  for (std::size_t k = 0; k < r.length(); ++k) {
    const MappingClass& g = r.increments[k];
    const long double na = a * g.a() + b * g.c(), nb = a * g.b() + b * g.d();
    const long double nc = c * g.a() + d * g.c(), nd = c * g.b() + d * g.d();
    const long double m = std::max({std::abs(na), std::abs(nb), std::abs(nc), std::abs(nd)});
    a = na / m, b = nb / m, c = nc / m, d = nd / m;
    s += std::log(m);
    const double oracle = log_sigma1(a, b, c, d, s);
    REQUIRE(r.forward[k] == Approx(oracle).epsilon(1e-9));
    REQUIRE(r.backward[k] == Approx(r.forward[k]).epsilon(1e-9));
  }
}

TEST_CASE("drift of the twist walk against a matrix-norm oracle") {
  const auto spec = iid({kT1, kT2}, 2024);
  const ModelPoint x0 = TorusPoint(0, 1);
  const auto est = drift_estimate(spec, x0, 400, 500, 4);
  CHECK(est.value > 5 * est.stderr_);
  CHECK(std::exp(est.value) > 1.0);
  CHECK(est.subadditivityExcess <= 1e-9);
  // Independent trials with their own generator.
  Rng rng(0xabcdef);
  double mean = 0.0, m2 = 0.0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::vector<MappingClass> word;
    for (int k = 0; k < 400; ++k) word.push_back(rng.uniform() < 0.5 ? kT1 : kT2);
    const double v = norm_growth(word);
    const double delta = v - mean;
    mean += delta / (t + 1);
    m2 += delta * (v - mean);
  }
  const double se = std::sqrt(m2 / (trials - 1) / trials);
  CHECK(std::abs(est.value - mean) <= 3 * std::hypot(se, est.stderr_));
  const auto half = drift_estimate(spec, x0, 200, 500, 4);
  // Finite-n bias decays like 1/n; the comparison allows for it.
  CHECK(std::abs(half.value - est.value) <= 3 * std::hypot(half.stderr_, est.stderr_) + 2.0 / 200);
}

TEST_CASE("sign walk on an Anosov class has vanishing rate") {
  const auto spec = iid({kA, kA.inverse()}, 5);
  const double step = 2.0 * std::log(std::numbers::phi);
  // Exact: L(i, A^k i) = |k| * step + O(1); the O(1) is bounded by one step.
  const auto r = sample_trajectory(spec, 400, TorusPoint(0, 1));
  long long pos = 0;
  for (std::size_t k = 0; k < r.length(); ++k) {
    pos += r.increments[k] == kA ? 1 : -1;
    REQUIRE(std::abs(r.forward[k] - std::abs(pos) * step) <= step);
  }
  // The mean L_n / n decays like n^{-1/2}: quadrupling n halves it.
  const auto e1 = drift_estimate(spec, TorusPoint(0, 1), 400, 1000, 4);
  const auto e4 = drift_estimate(spec, TorusPoint(0, 1), 1600, 1000, 4);
  const double ratio = e4.value / e1.value;
  const double ratioSe = ratio * std::hypot(e1.stderr_ / e1.value, e4.stderr_ / e4.value);
  CHECK(std::abs(ratio - 0.5) <= 3 * ratioSe + 0.02);
  CHECK(e4.value < 0.05);
}

TEST_CASE("other ergodic sources") {
  CocycleSpec m;
  m.source = MarkovSource{{{0.2, 0.8}, {0.6, 0.4}}, {kT1, kT2}};
  m.seed = 8;
  const auto em = drift_estimate(m, TorusPoint(0, 1), 200, 100);
  CHECK(em.value > 5 * em.stderr_);
  CocycleSpec r;
  r.source = RotationSource{golden_angle(), {0.5}, {kT1, kT2}};
  r.seed = 8;
  const auto er = drift_estimate(r, TorusPoint(0, 1), 200, 100);
  CHECK(er.value > 0.1);
  // Rotation coding: the cell sequence has the rotation's frequencies.
  const auto inc = sample_increments(r, 10000, 0);
  const auto ones = std::count(inc.begin(), inc.end(), kT1);
  CHECK(std::abs(static_cast<double>(ones) / 10000 - 0.5) < 1e-3);
}

TEST_CASE("Fricke model cocycle") {
  const auto spec = iid({kT1, kT2}, 12);
  const ModelPoint x0 = FrickePoint(3, 3, 3);
  const auto est = drift_estimate(spec, x0, 80, 40);
  CHECK(est.value > 5 * est.stderr_);
  CHECK(est.subadditivityExcess <= 1e-9);
  // L(x0, g x0) agrees with the enumerated metric for short words.
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const MappingClass g = random_class(rng, 4);
    const FrickePoint y = apply_mapping_class(FrickePoint(3, 3, 3), g);
    CHECK(orbit_metric(x0, {g}) == Approx(thurston_metric_enumerated(FrickePoint(3, 3, 3), y, 16).value).epsilon(1e-9));
  }
}

TEST_CASE("stable foliation of a deterministic Anosov cocycle") {
  const auto spec = iid({kA});
  const auto r = sample_trajectory(spec, 60, TorusPoint(0, 1));
  const auto e = estimate_stable_foliation(r);
  const Foliation oracle(std::numbers::phi, 1.0);
  CHECK(projective_angle(e.mu.vec(), oracle.vec()) < 1e-6);
}

TEST_CASE("stable foliation stabilises along a random walk") {
  const auto spec = iid({kT1, kT2}, 31);
  const auto r400 = sample_trajectory(spec, 400, TorusPoint(0, 1));
  const auto r200 = sample_trajectory(spec, 200, TorusPoint(0, 1));
  const auto a = estimate_stable_foliation(r400), b = estimate_stable_foliation(r200);
  CHECK(projective_angle(a.mu.vec(), b.mu.vec()) < 1e-4);
}

TEST_CASE("property: foliation estimate is equivariant under conjugation") {
  // Conjugating the cocycle by h conjugates f_n; the expanded direction of
  // f_n moves by h^{-T}, so mu moves by h and i(h mu, h alpha) = i(mu, alpha).
  const MappingClass h(1, 1, 1, 2);
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = iid({kT1, kT2}, rng.bits());
    auto r = sample_trajectory(spec, 100, TorusPoint(0, 1));
    const Foliation a = estimate_stable_foliation(r).mu;
    ScaledMatrix z;
    for (std::size_t k = 0; k < r.length(); ++k) {
      z = z * (h * r.increments[k] * h.inverse());
      r.products[k] = z;
    }
    const Foliation b = estimate_stable_foliation(r).mu;
    CHECK(projective_angle(apply_mapping_class_to_foliation(h, a).vec(), b.vec()) < 1e-9);
  }
}

TEST_CASE("sandwich on a deterministic Anosov cocycle") {
  const auto spec = iid({kA});
  const ModelPoint x0 = TorusPoint(0, 1);
  const auto r = sample_trajectory(spec, 400, x0);
  const Foliation mu = estimate_stable_foliation(r).mu;
  const double lambda = dilatation(kA);
  const auto panel = sandwich_panel(mu, 50, 0.1);
  REQUIRE(panel.size() == 50);
  const auto rep = sandwich_verify(r, mu, lambda, 0.05, panel, x0);
  CHECK(rep.withinCap);
  CHECK(rep.N <= 200);
  CHECK_FALSE(rep.degenerate);
  const auto inflated = sandwich_verify(r, mu, lambda + 0.5, 0.05, panel, x0);
  CHECK(inflated.lowerViolations > 0);
  CHECK(inflated.upperViolations == 0);
  CHECK_FALSE(inflated.withinCap);
}

TEST_CASE("sandwich lower bound is vacuous on the foliation's own slope") {
  const auto spec = iid({MappingClass(1, 1, 0, 1)});
  const ModelPoint x0 = TorusPoint(0, 1);
  const auto r = sample_trajectory(spec, 40, x0);
  const auto rep = sandwich_verify(r, Foliation(1, 0), 1.5, 0.05, {Slope{1, 0}}, x0);
  CHECK(rep.lowerViolations == 0);
  CHECK(intersection(Foliation(1, 0), Slope{1, 0}) == 0.0);
}

TEST_CASE("F cocycle") {
  const ModelPoint x0 = TorusPoint(0, 1);
  Rng rng(101);
  auto randomPoint = [&] { return TorusPoint(rng.uniform(-1, 1), std::exp(rng.uniform(-1, 1))); };
  CHECK(F_cocycle(MappingClass::identity(), Horofunction::interior(randomPoint()), x0) == 0.0);
  for (int k = 0; k < 1000; ++k) {
    const MappingClass g1 = random_class(rng, 4), g2 = random_class(rng, 4);
    const Horofunction h = k % 2 ? Horofunction::interior(randomPoint())
                                 : Horofunction::boundary({rng.uniform(-1, 1), rng.uniform(0.1, 1)});
    REQUIRE(F_cocycle(g1, act(g2, h), x0) + F_cocycle(g2, h, x0) == Approx(F_cocycle(g1 * g2, h, x0)).epsilon(1e-9));
  }
  for (int k = 0; k < 200; ++k) {
    const MappingClass g = random_class(rng, 5);
    const auto h = Horofunction::interior(act_on_point(g.inverse(), x0));
    const double attained = thurston_metric_exact(std::get<TorusPoint>(act_on_point(g, x0)), TorusPoint(0, 1));
    REQUIRE(std::abs(F_cocycle(g, h, x0) - attained) <= 1e-12 * std::max(1.0, attained));
  }
}

TEST_CASE("horofunction drift") {
  const auto spec = iid({kA});
  const ModelPoint x0 = TorusPoint(0, 1);
  const auto r = sample_trajectory(spec, 100, x0);
  const Foliation mu = estimate_stable_foliation(r).mu;
  const double l = r.forward.back() / 100.0;
  const auto good = horo_drift_verify(r, mu, x0);
  CHECK(good.resolvableUpTo >= 10);
  CHECK(std::abs(good.tail - l) <= 1e-2);
  const auto bad = horo_drift_verify(r, Foliation(mu.b(), -mu.a()), x0);
  CHECK(std::abs(bad.tail - l) > 1e-2);
}
