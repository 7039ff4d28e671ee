// Integral metric: exact values, metric laws, super-level sets, the quadrature
// oracle, and the measure-distortion inequality.
#include <doctest.h>

#include <cmath>

#include "circleflow/errors.hpp"
#include "circleflow/flows.hpp"
#include "circleflow/metric.hpp"
#include "circleflow/random_maps.hpp"

using namespace circleflow;

TEST_SUITE("metric") {

TEST_CASE("d_tilde1 exact values") {
  PacMap id = PacMap::identity(Domain::circle(1));
  PacMap f = example31(3);
  CHECK(d_tilde1(f, f).value == 0);
  CHECK(d_tilde1(f, f).exact);

  MetricValue rot = d_tilde1(PacMap::rotation(1, Rat(1) / 4), id);
  CHECK(rot.exact);
  CHECK(rot.value == Rat(1) / 4);  // constant integrand min(1/4, 3/4)

  // rotations: integral of the constant min(angle, l - angle), scaled by l
  CHECK(d_tilde1(PacMap::rotation(1, Rat(2) / 3), id).value == Rat(1) / 3);
  PacMap idh = PacMap::identity(Domain::circle(Rat(1) / 2));
  CHECK(d_tilde1(PacMap::rotation(Rat(1) / 2, Rat(1) / 8), idh).value ==
        Rat(1) / 2 * (Rat(1) / 8));
}

TEST_CASE("compressor family bounds") {
  PacMap id = PacMap::identity(Domain::circle(1));
  for (int n = 2; n <= 8; ++n) {
    PacMap f = example31(n);
    MetricValue close = d_tilde1(f, id);
    MetricValue far = d_tilde1(f.inverse(), id);
    REQUIRE(close.exact);
    REQUIRE(far.exact);
    CHECK(close.value <= Rat(1) / (2 * Rat(n)));
    CHECK(far.value >= Rat(1) / 24);
  }
}

TEST_CASE("metric_d exact values and symmetry under inversion") {
  PacMap id = PacMap::identity(Domain::circle(1));
  CHECK(metric_d(id, id).value == 0);
  for (int n = 1; n <= 5; ++n) {
    MetricValue d = metric_d(example41(n), id);
    REQUIRE(d.exact);
    CHECK(d.value == Rat(1) / Rat(Int(1) << n));
  }
  Rng rng(404);
  for (int i = 0; i < 40; ++i) {
    PacMap f = random_aiet(rng, 5), g = random_aiet(rng, 5);
    CHECK(metric_d(f, g).value == metric_d(f.inverse(), g.inverse()).value);
  }
}

TEST_CASE("d_tilde1 requires compatible single-circle maps") {
  PacMap id1 = PacMap::identity(Domain::circle(1));
  PacMap id2 = PacMap::identity(Domain::circle(Rat(1) / 2));
  CHECK_THROWS_AS(d_tilde1(id1, id2), validation_error);
  CHECK_THROWS_AS(d_tilde1(glue61(), glue61()), validation_error);
}

TEST_CASE("measure_U basics") {
  PacMap id = PacMap::identity(Domain::circle(1));
  PacMap f = example41(2);
  CHECK(measure_U(f, f, 0) == 0);
  CHECK(measure_U(f, f, Rat(1) / 10) == 0);

  // rotation by 1/4: distance to the identity is constantly 1/4
  PacMap r = PacMap::rotation(1, Rat(1) / 4);
  CHECK(measure_U(r, id, Rat(1) / 8) == 1);   // 1/4 > 1/8 everywhere
  CHECK(measure_U(r, id, Rat(1) / 4) == 0);   // strict inequality
  CHECK(measure_U(r, id, Rat(1) / 2) == 0);

  CHECK_THROWS_AS(measure_U(f, id, Rat(-1) / 8), validation_error);
  CHECK_THROWS_AS(measure_U(glued_flow61(Rat(1) / 4), id, Rat(1) / 8),
                  validation_error);  // numeric maps are not exact
}

TEST_CASE("measure_U monotone in the threshold, Markov bound") {
  Rng rng(505);
  for (int i = 0; i < 60; ++i) {
    PacMap f = random_aiet(rng, 6), g = random_aiet(rng, 6);
    Rat prev = measure_U(f, g, 0);
    for (const Rat& d0 : {Rat(1) / 32, Rat(1) / 8, Rat(1) / 4, Rat(3) / 8}) {
      Rat cur = measure_U(f, g, d0);
      CHECK(cur <= prev);
      prev = cur;
      // integral dominates threshold * measure above the threshold
      CHECK(d0 * cur <= d_tilde1(f, g).value);
    }
  }
}

TEST_CASE("super-level measure at multiples of the distance") {
  Rng rng(606);
  for (int i = 0; i < 60; ++i) {
    PacMap f = random_aiet(rng, 6), g = random_aiet(rng, 6);
    for (int n : {2, 10, 100})
      CHECK(measure_U_n(f, g, n) <= Rat(1) / n);
  }
  PacMap id = PacMap::identity(Domain::circle(1));
  CHECK(measure_U_n(id, id, 5) == 0);  // zero distance edge case
}

TEST_CASE("distance bounded through any super-level split") {
  // mu(U(f,g)[d0]) = m implies d~1(f,g) <= m/2 + d0*(1-m) on the unit circle
  Rng rng(707);
  for (int i = 0; i < 60; ++i) {
    PacMap f = random_aiet(rng, 6), g = random_aiet(rng, 6);
    Rat dist = d_tilde1(f, g).value;
    for (const Rat& d0 : {Rat(1) / 16, Rat(1) / 8, Rat(1) / 4}) {
      Rat m = measure_U(f, g, d0);
      CHECK(dist <= m / 2 + d0 * (1 - m));
    }
  }
}

TEST_CASE("quadrature oracle") {
  PacMap id = PacMap::identity(Domain::circle(1));
  PacMap f = example31(2);
  CHECK(quad_oracle_d_tilde1(f, f, 1000) == 0);
  CHECK(std::abs(quad_oracle_d_tilde1(PacMap::rotation(1, Rat(1) / 4), id, 100000) -
                 0.25) <= 1e-8);

  Rng rng(808);
  for (int i = 0; i < 10; ++i) {
    PacMap a = random_aiet(rng, 6), b = random_aiet(rng, 6);
    MetricValue exact = d_tilde1(a, b);
    REQUIRE(exact.exact);
    double est = quad_oracle_d_tilde1(a, b, 200000);
    CHECK(std::abs(est - to_double(exact.value)) <= 1e-6);
  }
}

TEST_CASE("numeric path: chart maps get coherent estimates") {
  PacMap g = glued_flow61(Rat(1) / 4);
  MetricValue self = metric_d(g, g);
  CHECK_FALSE(self.exact);
  CHECK(self.upper() <= 1e-12);

  PacMap id = PacMap::identity(Domain::circle(1));
  MetricValue d = d_tilde1(g, id);
  CHECK_FALSE(d.exact);
  CHECK(d.approx > 0);
  double est = quad_oracle_d_tilde1(g, id, 200000);
  CHECK(std::abs(est - d.approx) <= 1e-5);
  // the reported error bound is honest against the oracle
  CHECK(std::abs(est - d.approx) <= d.err + 1e-5);
}

TEST_CASE("measure distortion bound") {
  PacMap id = PacMap::identity(Domain::circle(1));
  CHECK(measure_distortion_check(id, make_arc(Rat(1) / 8, Rat(1) / 4, 1)));

  for (int n = 2; n <= 8; ++n) {
    PacMap f = example31(n);
    Arc I = make_arc(1 - Rat(1) / (4 * Rat(n)), Rat(1) / (4 * Rat(n)), 1);
    CHECK(f.image_measure(I) == Rat(1) / 8);  // the bound is informative here
    CHECK(measure_distortion_check(f, I));
  }

  Rng rng(909);
  for (int i = 0; i < 200; ++i) {
    PacMap g = random_aiet(rng, 6);
    CHECK(measure_distortion_check(g, random_arc(rng, 1)));
  }

  // an arc longer than half the circle is rejected
  CHECK_THROWS_AS(measure_distortion_check(id, make_arc(0, Rat(3) / 4, 1)),
                  validation_error);
}

}  // TEST_SUITE
