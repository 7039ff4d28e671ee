// Domains: finite disjoint unions of circles, and component-tagged points on them.
#pragma once

#include <string>
#include <vector>

#include "circleflow/rational.hpp"

namespace circleflow {

struct Domain {
  std::vector<Rat> lens;  // circumference per component, all > 0

  static Domain circle(const Rat& l);

  int components() const { return static_cast<int>(lens.size()); }
  const Rat& len(int comp) const;
  Rat total() const;

  bool operator==(const Domain&) const = default;
};

Domain make_domain(std::vector<Rat> lens);

struct DPoint {
  int comp = 0;
  Rat pos;  // in [0, lens[comp])

  bool operator==(const DPoint&) const = default;
};

// Validates the component index and reduces pos into range.
DPoint make_dpoint(const Domain& d, int comp, const Rat& pos);

std::string format_dpoint(const DPoint& p);

}  // namespace circleflow
