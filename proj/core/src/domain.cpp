#include "circleflow/domain.hpp"

#include "circleflow/errors.hpp"

namespace circleflow {

Domain Domain::circle(const Rat& l) { return make_domain({l}); }

const Rat& Domain::len(int comp) const {
  if (comp < 0 || comp >= components())
    throw validation_error("component index out of range");
  return lens[static_cast<std::size_t>(comp)];
}

Rat Domain::total() const {
  Rat t = 0;
  for (const Rat& l : lens) t += l;
  return t;
}

Domain make_domain(std::vector<Rat> lens) {
  if (lens.empty()) throw validation_error("domain needs at least one component");
  for (const Rat& l : lens)
    if (l <= 0) throw validation_error("domain component circumference must be positive");
  Domain d;
  d.lens = std::move(lens);
  return d;
}

DPoint make_dpoint(const Domain& d, int comp, const Rat& pos) {
  DPoint p;
  p.comp = comp;
  p.pos = reduce_mod(pos, d.len(comp));  // len() validates comp
  return p;
}

std::string format_dpoint(const DPoint& p) {
  return "(" + std::to_string(p.comp) + ", " + format_rat(p.pos) + ")";
}

}  // namespace circleflow
