#include "circleflow/circle.hpp"

#include <algorithm>

#include "circleflow/errors.hpp"

namespace circleflow {

static void require_positive_len(const Rat& l) {
  if (l <= 0) throw validation_error("circle circumference must be positive");
}

Rat circle_dist(const Rat& x, const Rat& y, const Rat& l) {
  require_positive_len(l);
  Rat r = reduce_mod(x - y, l);
  Rat other = l - r;
  return r <= other ? r : other;
}

Arc make_arc(const Rat& start, const Rat& length, const Rat& l,
             bool incl_start, bool incl_end) {
  require_positive_len(l);
  if (length <= 0 || length > l)
    throw validation_error("arc length must lie in (0, circumference]");
  Arc a;
  a.start = reduce_mod(start, l);
  a.length = length;
  a.incl_start = incl_start;
  a.incl_end = incl_end;
  return a;
}

Rat arc_end(const Arc& a, const Rat& l) { return reduce_mod(a.start + a.length, l); }

Rat arc_measure(const Arc& a) { return a.length; }

bool arc_is_full(const Arc& a, const Rat& l) { return a.length == l; }

bool arc_contains(const Arc& a, const Rat& p, const Rat& l) {
  if (arc_is_full(a, l)) return true;
  Rat off = reduce_mod(p - a.start, l);
  if (off == 0) return a.incl_start;
  if (off == a.length) return a.incl_end;
  return off < a.length;
}

Arc half_interval(const Arc& a, Side side, const Rat& l) {
  if (arc_is_full(a, l))
    throw validation_error("half interval of the full circle is undefined");
  Rat half = a.length / 2;
  Arc r;
  r.length = half;
  r.incl_start = a.incl_start;
  r.incl_end = a.incl_end;
  r.start = (side == Side::right) ? reduce_mod(a.start + half, l) : a.start;
  return r;
}

static void require_ball_radius(const Rat& delta, const Rat& l) {
  if (delta <= 0 || 2 * delta >= l)
    throw validation_error("ball radius must lie in (0, circumference/2)");
}

Arc ball(const Rat& p, const Rat& delta, const Rat& l) {
  require_ball_radius(delta, l);
  return make_arc(p - delta, 2 * delta, l, false, false);
}

Arc ball_plus(const Rat& p, const Rat& delta, const Rat& l) {
  require_ball_radius(delta, l);
  return make_arc(p, delta, l, true, false);
}

Arc ball_star_plus(const Rat& p, const Rat& delta, const Rat& l) {
  require_ball_radius(delta, l);
  return make_arc(p, delta, l, false, false);
}

Arc ball_minus(const Rat& p, const Rat& delta, const Rat& l) {
  require_ball_radius(delta, l);
  return make_arc(p - delta, delta, l, false, true);
}

Arc ball_star_minus(const Rat& p, const Rat& delta, const Rat& l) {
  require_ball_radius(delta, l);
  return make_arc(p - delta, delta, l, false, false);
}

bool is_ordered_tuple(const std::vector<Rat>& pts, const Rat& l) {
  require_positive_len(l);
  std::vector<Rat> reduced;
  reduced.reserve(pts.size());
  for (const Rat& p : pts) reduced.push_back(reduce_mod(p, l));

  std::vector<Rat> sorted = reduced;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw validation_error("ordered-tuple test requires pairwise distinct points");

  if (reduced.size() <= 2) return true;
  Rat prev = 0;
  for (std::size_t i = 1; i < reduced.size(); ++i) {
    Rat off = reduce_mod(reduced[i] - reduced[0], l);
    if (off <= prev) return false;
    prev = off;
  }
  return true;
}

Rat min_pairwise_dist(const std::vector<Rat>& pts, const Rat& l) {
  if (pts.size() < 2)
    throw validation_error("minimum pairwise distance needs at least two points");
  std::vector<Rat> sorted;
  sorted.reserve(pts.size());
  for (const Rat& p : pts) sorted.push_back(reduce_mod(p, l));
  std::sort(sorted.begin(), sorted.end());
  Rat best = circle_dist(sorted.back(), sorted.front(), l);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    Rat d = circle_dist(sorted[i - 1], sorted[i], l);
    if (d < best) best = d;
  }
  return best;
}

Rat dist_to_set(const Rat& p, const std::vector<Rat>& set, const Rat& l) {
  if (set.empty()) throw validation_error("distance to an empty set is undefined");
  Rat best = circle_dist(p, set.front(), l);
  for (std::size_t i = 1; i < set.size(); ++i) {
    Rat d = circle_dist(p, set[i], l);
    if (d < best) best = d;
  }
  return best;
}

std::vector<Arc> merge_arcs(std::vector<Arc> arcs, const Rat& l) {
  require_positive_len(l);
  if (arcs.empty()) return {};
  for (const Arc& a : arcs)
    if (a.length <= 0 || a.length > l) throw validation_error("invalid arc in union");

  // Work with lifted intervals [start, start+length); some may extend past l.
  std::sort(arcs.begin(), arcs.end(),
            [](const Arc& a, const Arc& b) { return a.start < b.start; });

  std::vector<std::pair<Rat, Rat>> groups;  // lifted [begin, end]
  for (const Arc& a : arcs) {
    Rat s = a.start;
    Rat e = a.start + a.length;
    if (!groups.empty() && s <= groups.back().second) {
      if (e > groups.back().second) groups.back().second = e;
    } else {
      groups.emplace_back(s, e);
    }
  }
  // Wraparound: the last group may spill past l into the first groups.
  while (groups.size() > 1 && groups.back().second >= groups.front().first + l) {
    Rat spill = groups.back().second;
    Rat cand = groups.front().second + l;
    groups.back().second = cand > spill ? cand : spill;
    groups.erase(groups.begin());
  }
  if (groups.size() == 1 && groups.front().second - groups.front().first >= l) {
    Arc full;
    full.start = 0;
    full.length = l;
    full.incl_start = true;
    full.incl_end = false;
    return {full};
  }

  std::vector<Arc> out;
  out.reserve(groups.size());
  for (const auto& [s, e] : groups) {
    Arc a;
    a.start = reduce_mod(s, l);
    a.length = e - s;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [](const Arc& a, const Arc& b) { return a.start < b.start; });
  return out;
}

Rat arcs_total_measure(const std::vector<Arc>& arcs) {
  Rat total = 0;
  for (const Arc& a : arcs) total += a.length;
  return total;
}

}  // namespace circleflow
