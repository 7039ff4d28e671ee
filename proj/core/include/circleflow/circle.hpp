// Exact geometry on circles R/lZ: distance, arcs with endpoint flags, balls, half-intervals, cyclic order.
#pragma once

#include <vector>

#include "circleflow/rational.hpp"

namespace circleflow {

// Distance induced by the quotient R -> R/lZ: min(r, l-r) with r = (x-y) mod l.
Rat circle_dist(const Rat& x, const Rat& y, const Rat& l);

// An arc of a circle of circumference l, stored as (start, length) with endpoint
// inclusion flags so the full circle (length == l) is representable and measure is O(1).
// The default flags give the half-open [start, start+length).
struct Arc {
  Rat start;               // in [0, l)
  Rat length;              // in (0, l]
  bool incl_start = true;
  bool incl_end = false;

  bool operator==(const Arc&) const = default;
};

// Validates 0 < length <= l and reduces start into [0, l).
Arc make_arc(const Rat& start, const Rat& length, const Rat& l,
             bool incl_start = true, bool incl_end = false);

Rat arc_end(const Arc& a, const Rat& l);     // reduced position of start+length
Rat arc_measure(const Arc& a);               // == a.length
bool arc_is_full(const Arc& a, const Rat& l);
bool arc_contains(const Arc& a, const Rat& p, const Rat& l);

enum class Side { left, right };

// Sub-arc from the midpoint to the end (right) or from the start to the midpoint (left).
// Both halves inherit the original endpoint flags verbatim: the surviving original
// endpoint keeps its flag, and the new midpoint endpoint takes the flag of the endpoint
// it replaced. Throws on the full circle (no midpoint).
Arc half_interval(const Arc& a, Side side, const Rat& l);

// Open ball (p-delta, p+delta) and its four half-interval variants:
//   ball_plus       [p, p+delta)
//   ball_star_plus  (p, p+delta)
//   ball_minus      (p-delta, p]
//   ball_star_minus (p-delta, p)
// All require 0 < delta < l/2.
Arc ball(const Rat& p, const Rat& delta, const Rat& l);
Arc ball_plus(const Rat& p, const Rat& delta, const Rat& l);
Arc ball_star_plus(const Rat& p, const Rat& delta, const Rat& l);
Arc ball_minus(const Rat& p, const Rat& delta, const Rat& l);
Arc ball_star_minus(const Rat& p, const Rat& delta, const Rat& l);

// True iff the points appear in strictly counterclockwise cyclic order starting from
// the first one; equivalently every 3-subtuple (i1<i2<i3) has x_{i2} strictly inside
// the counterclockwise open arc from x_{i1} to x_{i3}. Tuples of size <= 2 are ordered.
// Duplicate points are a validation_error.
bool is_ordered_tuple(const std::vector<Rat>& pts, const Rat& l);

// Minimum pairwise circle distance; requires at least 2 points.
Rat min_pairwise_dist(const std::vector<Rat>& pts, const Rat& l);

// min_{s in set} circle_dist(p, s); requires a nonempty set.
Rat dist_to_set(const Rat& p, const std::vector<Rat>& set, const Rat& l);

// Union of arcs as a list of arcs with disjoint interiors, sorted by start. Endpoint
// flags are ignored (results carry default flags): arcs are merged when they overlap
// or touch, so the total measure of the result equals the measure of the union.
std::vector<Arc> merge_arcs(std::vector<Arc> arcs, const Rat& l);

Rat arcs_total_measure(const std::vector<Arc>& arcs);

}  // namespace circleflow
