// L1 distance between circle maps, its inverse-symmetrized metric, super-level
// sets of the pointwise distance, and an independent quadrature oracle.
#pragma once

#include "circleflow/circle.hpp"
#include "circleflow/pac_map.hpp"

namespace circleflow {

// Result of an integral distance computation: exact rational for affine-only
// inputs, double estimate with a conservative error bound otherwise.
struct MetricValue {
  bool exact = true;
  Rat value = 0;      // meaningful when exact
  double approx = 0;  // always set
  double err = 0;     // 0 when exact

  double upper() const { return approx + err; }
};

// Integral over the source circle of the circle distance between f(x) and g(x).
// Requires f and g to share a single-circle source and a single-circle target.
// Exact for affine-only inputs: the circle is refined by both maps' piece starts,
// the lifted difference is affine per refined arc, arcs are split exactly where
// the difference crosses a multiple of half the target circumference, and each
// cell integrates in closed form. Flow-chart inputs use crossing-aware adaptive
// quadrature and report an error bound.
MetricValue d_tilde1(const PacMap& f, const PacMap& g);

// d_tilde1(f, g) + d_tilde1(f^-1, g^-1): the group-compatible metric.
MetricValue metric_d(const PacMap& f, const PacMap& g);

// Measure of {x : circle_dist(f(x), g(x)) > delta}. Affine-only maps, exact;
// delta >= 0.
Rat measure_U(const PacMap& f, const PacMap& g, const Rat& delta);

// measure_U at threshold n * d_tilde1(f, g); n >= 1, affine-only maps.
Rat measure_U_n(const PacMap& f, const PacMap& g, int n);

// Midpoint-rule estimate of d_tilde1 on a uniform grid refined by all piece
// starts; deliberately simple, used to cross-check the exact integrator.
double quad_oracle_d_tilde1(const PacMap& f, const PacMap& g, long samples);

// Whether d(g, id) >= |mu(I) - mu(g(I))|^2 / 8. Holds for every valid circle
// self-map g and arc I with mu(I) <= l/2; exposed as a property-test predicate.
bool measure_distortion_check(const PacMap& g, const Arc& I);

}  // namespace circleflow
