// Randomized property suites over seeded piecewise-affine bijections: group
// axioms, metric laws, inversion isometry, breakpoint composition laws,
// super-level and ball measures, invariances, and persistence of jumps.
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "circleflow/flows.hpp"
#include "circleflow/metric.hpp"
#include "circleflow/pac_map.hpp"
#include "circleflow/random_maps.hpp"

using namespace circleflow;

namespace {
constexpr int kRounds = 500;

std::vector<Rat> positions(const std::vector<DPoint>& pts) {
  std::vector<Rat> out;
  for (const DPoint& p : pts) out.push_back(p.pos);
  return out;
}
}  // namespace

TEST_SUITE("properties") {

TEST_CASE("group axioms on random piecewise-affine bijections") {
  Rng rng(42);
  PacMap id = PacMap::identity(Domain::circle(1));
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5), h = random_aiet(rng, 5);
    CHECK(compose(compose(f, g), h).equals(compose(f, compose(g, h))));
    CHECK(compose(f, id).equals(f));
    CHECK(compose(id, f).equals(f));
    CHECK(compose(f, f.inverse()).equals(id));
    CHECK(compose(f.inverse(), f).equals(id));
  }
}

TEST_CASE("metric axioms hold exactly") {
  Rng rng(43);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5), h = random_aiet(rng, 5);
    MetricValue dfg = metric_d(f, g);
    REQUIRE(dfg.exact);
    CHECK(dfg.value >= 0);
    CHECK(metric_d(f, f).value == 0);
    CHECK(dfg.value == metric_d(g, f).value);
    CHECK(dfg.value <= metric_d(f, h).value + metric_d(h, g).value);
    if (dfg.value == 0) CHECK(f.equals(g));
  }
}

TEST_CASE("inversion is an isometry") {
  Rng rng(44);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    CHECK(metric_d(f, g).value == metric_d(f.inverse(), g.inverse()).value);
  }
}

TEST_CASE("a broken inversion breaks the isometry: negative control") {
  // Substituting f for f^-1 (a deliberately wrong inversion) must be caught by
  // the isometry law; this guards the law's power to detect sign-style bugs.
  PacMap id = PacMap::identity(Domain::circle(1));
  PacMap f = example31(3);
  Rat honest = metric_d(f, id).value;                      // d~1(f,id) + d~1(f^-1,id)
  Rat buggy = d_tilde1(f, id).value + d_tilde1(f, id).value;  // "inverse" = f itself
  CHECK(honest != buggy);
}

TEST_CASE("breakpoints of a composition and the cardinality bounds") {
  Rng rng(45);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    PacMap fg = compose(f, g);
    // BP0(f.g) is contained in BP0(g) union g^-1(BP0(f))
    std::set<Rat> allowed;
    for (const DPoint& p : g.bp0()) allowed.insert(p.pos);
    PacMap ginv = g.inverse();
    for (const DPoint& p : f.bp0()) allowed.insert(ginv.evaluate(p).pos);
    for (const DPoint& p : fg.bp0()) CHECK(allowed.count(p.pos) == 1);

    int sf = f.sharp(), sg = g.sharp(), sfg = fg.sharp();
    CHECK(std::abs(sf - sg) <= sfg);
    CHECK(sfg <= sf + sg);
  }
}

TEST_CASE("breakpoints of the inverse are exactly the image of the breakpoints") {
  Rng rng(46);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5);
    std::vector<Rat> img;
    for (const DPoint& p : f.bp0()) img.push_back(f.evaluate(p).pos);
    std::sort(img.begin(), img.end());
    CHECK(img == positions(f.inverse().bp0()));
  }
}

TEST_CASE("super-level sets at n times the distance have measure at most 1/n") {
  Rng rng(47);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    for (int n : {2, 5})
      CHECK(measure_U_n(f, g, n) <= Rat(1) / n);
  }
}

TEST_CASE("measure distortion of an arc bounds the distance to the identity") {
  Rng rng(48);
  for (int i = 0; i < kRounds; ++i) {
    PacMap g = random_aiet(rng, 5);
    Arc I = random_arc(rng, 1);
    CHECK(measure_distortion_check(g, I));
  }
}

TEST_CASE("breakpoint ball unions have measure at most 1/n") {
  Rng rng(49);
  for (int i = 0; i < kRounds; ++i) {
    PacMap f = random_aiet(rng, 5);
    for (int n : {1, 3})
      CHECK(f.v_n_measure(n) <= Rat(1) / n);
  }
}

TEST_CASE("rotations converge to each other exactly as the angles do") {
  // d(R_{a+1/n}, R_a) = 2/n exactly, witnessing convergence in the metric
  Rat a = Rat(2) / 7;
  for (int n = 3; n <= 40; ++n) {
    MetricValue d = metric_d(PacMap::rotation(1, a + Rat(1) / n),
                             PacMap::rotation(1, a));
    REQUIRE(d.exact);
    CHECK(d.value == Rat(2) / n);
    // and the super-level measure vanishes once the threshold beats the angle gap
    CHECK(measure_U(PacMap::rotation(1, a + Rat(1) / n), PacMap::rotation(1, a),
                    Rat(1) / n) == 0);
  }
}

TEST_CASE("left rotation leaves the integral distance invariant") {
  Rng rng(50);
  for (int i = 0; i < 100; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    PacMap r = PacMap::rotation(1, random_rational(rng, 64));
    CHECK(d_tilde1(compose(r, f), compose(r, g)).value == d_tilde1(f, g).value);
  }
}

TEST_CASE("right composition with a measure-preserving map is an isometry of d~1") {
  PacMap h = example41(2);  // slope-1 involution: preserves Lebesgue measure
  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    CHECK(d_tilde1(compose(f, h), compose(g, h)).value == d_tilde1(f, g).value);
  }
  Rng rng2(52);
  for (int i = 0; i < 50; ++i) {
    PacMap f = random_aiet(rng2, 5), g = random_aiet(rng2, 5);
    PacMap iet = random_iet(rng2, 5);  // any slope-1 exchange works
    CHECK(d_tilde1(compose(f, iet), compose(g, iet)).value == d_tilde1(f, g).value);
  }
}

TEST_CASE("discontinuities persist under small perturbations") {
  // conjugating by small rotations moves breakpoints at most by the angles
  Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    PacMap f = random_aiet(rng, 5);
    if (f.is_continuous()) continue;
    Rat s = Rat(1) / (64 + static_cast<long>(rng() % 64));
    PacMap g = compose(PacMap::rotation(1, s), compose(f, PacMap::rotation(1, s)));
    CHECK(metric_d(f, g).value <= 4 * s);  // both factors move mass at most s, twice
    auto gb = positions(g.bp0());
    REQUIRE_FALSE(gb.empty());
    for (const DPoint& p : f.bp0())
      CHECK(dist_to_set(p.pos, gb, 1) <= s);
  }
  // and the jump count never drops along the Cauchy chain that motivates it
  for (int n = 1; n < 8; ++n)
    CHECK(cauchy46(n + 1).sharp() > cauchy46(n).sharp());
}

TEST_CASE("maximal continuity intervals map onto maximal continuity intervals") {
  Rng rng(54);
  for (int i = 0; i < 100; ++i) {
    PacMap f = random_aiet(rng, 5);
    auto back = f.inverse().continuity_intervals();
    if (f.is_continuous()) {  // both sides are the full circle, anchored at 0
      REQUIRE(back.size() == 1);
      CHECK(arc_is_full(back[0], 1));
      continue;
    }
    for (const Arc& I : f.continuity_intervals()) {
      Rat start = f.evaluate(DPoint{0, I.start}).pos;
      Rat len = f.image_measure(I);
      bool matched = false;
      for (const Arc& J : back) matched = matched || (J.start == start && J.length == len);
      CHECK(matched);
    }
  }
}

}  // TEST_SUITE
