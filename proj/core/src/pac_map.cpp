#include "circleflow/pac_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "circleflow/errors.hpp"

namespace circleflow {

static constexpr double kAutoNumericEps = 1e-12;  // jump threshold for numeric maps
static constexpr double kNumericTileTol = 1e-9;   // image-tiling slack for numeric maps

bool transform_is_affine(const Transform& tf) {
  return std::holds_alternative<Affine>(tf);
}

// Chart value without the post-translation. Exact at the fixed points, double-backed
// (recorded as an exact dyadic) elsewhere, clamped into the chart interval.
static Rat chart_value(const FlowChart& c, const Rat& xhat) {
  if (xhat == c.r) return c.r;
  if (xhat == c.a) return c.a;
  double xd = to_double(xhat);
  double rd = to_double(c.r);
  double ad = to_double(c.a);
  double u = (xd - rd) / (ad - xd);
  double w = u * std::exp(c.t);
  double y = rd + (ad - rd) * (w / (1.0 + w));
  if (!std::isfinite(y)) y = ad;
  double lo = std::min(rd, ad);
  double hi = std::max(rd, ad);
  y = std::min(std::max(y, lo), hi);
  return rat_of_double(y);
}

Rat transform_apply(const Transform& tf, const Rat& xhat) {
  if (const Affine* a = std::get_if<Affine>(&tf)) return a->slope * xhat + a->offset;
  const FlowChart& c = std::get<FlowChart>(tf);
  return chart_value(c, xhat) + c.post;
}

Rat transform_invert_value(const Transform& tf, const Rat& yhat) {
  if (const Affine* a = std::get_if<Affine>(&tf)) return (yhat - a->offset) / a->slope;
  const FlowChart& c = std::get<FlowChart>(tf);
  FlowChart back{c.r, c.a, -c.t, 0};
  return chart_value(back, yhat - c.post);
}

// T'(x^) = T(x^ + delta): re-expresses a transform after translating its frame.
static Transform shift_frame(const Transform& tf, const Rat& delta) {
  if (const Affine* a = std::get_if<Affine>(&tf))
    return Affine{a->slope, a->offset + a->slope * delta};
  const FlowChart& c = std::get<FlowChart>(tf);
  return FlowChart{c.r - delta, c.a - delta, c.t, c.post + delta};
}

// C(x^) = outer(inner(x^) - k). Throws on combinations outside the closed catalog.
static Transform combine_transforms(const Transform& outer, const Rat& k,
                                    const Transform& inner) {
  const Affine* ia = std::get_if<Affine>(&inner);
  const Affine* oa = std::get_if<Affine>(&outer);
  if (ia && oa)
    return Affine{oa->slope * ia->slope,
                  oa->slope * (ia->offset - k) + oa->offset};
  if (ia) {
    const FlowChart& oc = std::get<FlowChart>(outer);
    if (ia->slope != 1)
      throw validation_error(
          "unsupported composition: non-isometric affine piece feeding a flow chart");
    Rat s = ia->offset - k;
    return FlowChart{oc.r - s, oc.a - s, oc.t, oc.post + s};
  }
  const FlowChart& ic = std::get<FlowChart>(inner);
  if (oa) {
    if (oa->slope != 1)
      throw validation_error(
          "unsupported composition: flow chart feeding a non-isometric affine piece");
    return FlowChart{ic.r, ic.a, ic.t, ic.post - k + oa->offset};
  }
  const FlowChart& oc = std::get<FlowChart>(outer);
  if (oc.r != ic.r + ic.post - k || oc.a != ic.a + ic.post - k)
    throw validation_error("unsupported composition: flow charts over different arcs");
  return FlowChart{ic.r, ic.a, ic.t + oc.t, ic.post - k + oc.post};
}

std::pair<Rat, Rat> PacMap::piece_image(const Piece& p) const {
  Rat y0 = transform_apply(p.tf, p.start);
  Rat y1 = transform_apply(p.tf, p.start + p.len);
  return {y0, y1};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct ImageArc {
  Rat beta;  // reduced image start
  Rat len;
  std::size_t piece;
};

bool any_numeric(const std::vector<Piece>& pieces) {
  for (const Piece& p : pieces)
    if (!transform_is_affine(p.tf)) return true;
  return false;
}

std::string rat_str(const Rat& x) { return format_rat(x); }

}  // namespace

static std::vector<std::string> check_map(const Domain& src, const Domain& dst,
                                          const std::vector<Piece>& pieces,
                                          bool force_numeric = false) {
  std::vector<std::string> bad;
  if (src.lens.empty() || dst.lens.empty()) {
    bad.push_back("domain has no components");
    return bad;
  }
  for (const Rat& l : src.lens)
    if (l <= 0) bad.push_back("source component with nonpositive circumference");
  for (const Rat& l : dst.lens)
    if (l <= 0) bad.push_back("target component with nonpositive circumference");
  if (pieces.empty()) bad.push_back("map has no pieces");
  if (!bad.empty()) return bad;

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    std::string where = "piece " + std::to_string(i);
    if (p.src_comp < 0 || p.src_comp >= src.components() ||
        p.dst_comp < 0 || p.dst_comp >= dst.components()) {
      bad.push_back(where + ": component index out of range");
      continue;
    }
    const Rat& ls = src.lens[static_cast<std::size_t>(p.src_comp)];
    if (p.start < 0 || p.start >= ls)
      bad.push_back(where + ": start outside [0, circumference)");
    if (p.len <= 0 || p.len > ls)
      bad.push_back(where + ": length outside (0, circumference]");
    if (const Affine* a = std::get_if<Affine>(&p.tf)) {
      if (a->slope <= 0)
        bad.push_back(where + ": orientation violation (slope " +
                      rat_str(a->slope) + " is not positive)");
    } else {
      const FlowChart& c = std::get<FlowChart>(p.tf);
      if (c.r == c.a) bad.push_back(where + ": flow chart with coincident fixed points");
      if (!std::isfinite(c.t)) bad.push_back(where + ": flow chart with non-finite time");
      if (c.r != c.a) {
        Rat lo = c.r < c.a ? c.r : c.a;
        Rat hi = c.r < c.a ? c.a : c.r;
        if (p.start < lo || p.start + p.len > hi)
          bad.push_back(where + ": flow chart does not cover its piece");
      }
    }
  }
  if (!bad.empty()) return bad;

  const bool numeric = force_numeric || any_numeric(pieces);
  auto close = [&](const Rat& gap) {
    if (!numeric) return gap == 0;
    return std::abs(to_double(gap)) <= kNumericTileTol;
  };

  // Source tiling, per component.
  std::vector<std::size_t> order(pieces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (pieces[x].src_comp != pieces[y].src_comp)
      return pieces[x].src_comp < pieces[y].src_comp;
    return pieces[x].start < pieces[y].start;
  });
  for (int c = 0; c < src.components(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i : order)
      if (pieces[i].src_comp == c) idx.push_back(i);
    if (idx.empty()) {
      bad.push_back("source component " + std::to_string(c) + " has no pieces");
      continue;
    }
    const Rat& l = src.lens[static_cast<std::size_t>(c)];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Piece& cur = pieces[idx[k]];
      const Piece& nxt = pieces[idx[(k + 1) % idx.size()]];
      Rat expected = cur.start + cur.len;
      Rat actual = nxt.start + (k + 1 == idx.size() ? l : Rat(0));
      if (actual < expected)
        bad.push_back("source arcs overlap near " + rat_str(nxt.start) +
                      " on component " + std::to_string(c));
      else if (actual > expected)
        bad.push_back("source arcs leave a gap near " + rat_str(nxt.start) +
                      " on component " + std::to_string(c));
    }
  }
  if (!bad.empty()) return bad;

  // Image tiling, per target component.
  std::vector<std::vector<ImageArc>> images(static_cast<std::size_t>(dst.components()));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    const Rat& ld = dst.lens[static_cast<std::size_t>(p.dst_comp)];
    Rat y0 = transform_apply(p.tf, p.start);
    Rat y1 = transform_apply(p.tf, p.start + p.len);
    Rat len = y1 - y0;
    if (len <= 0) {
      bad.push_back("piece " + std::to_string(i) + ": image is not increasing");
      continue;
    }
    if (!(len <= ld) && !close(len - ld)) {
      bad.push_back("piece " + std::to_string(i) + ": image longer than its target circle");
      continue;
    }
    images[static_cast<std::size_t>(p.dst_comp)].push_back(
        ImageArc{reduce_mod(y0, ld), len, i});
  }
  if (!bad.empty()) return bad;

  for (int c = 0; c < dst.components(); ++c) {
    auto& arcs = images[static_cast<std::size_t>(c)];
    const Rat& l = dst.lens[static_cast<std::size_t>(c)];
    if (arcs.empty()) {
      bad.push_back("target component " + std::to_string(c) + " is not covered");
      continue;
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const ImageArc& x, const ImageArc& y) { return x.beta < y.beta; });
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const ImageArc& cur = arcs[k];
      const ImageArc& nxt = arcs[(k + 1) % arcs.size()];
      Rat expected = cur.beta + cur.len;
      Rat actual = nxt.beta + (k + 1 == arcs.size() ? l : Rat(0));
      if (!close(actual - expected)) {
        if (actual < expected)
          bad.push_back("image overlap near " + rat_str(nxt.beta) +
                        " on target component " + std::to_string(c));
        else
          bad.push_back("image gap near " + rat_str(nxt.beta) +
                        " on target component " + std::to_string(c));
      }
    }
  }
  return bad;
}

std::vector<std::string> PacMap::validate_report() const {
  return check_map(source_, target_, pieces_, numeric_);
}

// ---------------------------------------------------------------------------
// Construction and normalization

// Merge q into p if q continues p's transform across their shared boundary.
// q must be p's cyclic successor on the same source component.
static bool try_merge(Piece& p, const Piece& q, const Rat& l_src, const Rat& l_dst) {
  if (p.dst_comp != q.dst_comp) return false;
  if (p.len + q.len > l_src) return false;
  Rat c = (p.start + p.len) - q.start;  // 0, or l_src across the wrap point

  if (const Affine* pa = std::get_if<Affine>(&p.tf)) {
    const Affine* qa = std::get_if<Affine>(&q.tf);
    if (!qa) return false;
    if (pa->slope != qa->slope) return false;
    // successor transform in p's continued frame: x^ -> qa(x^ - c)
    Rat off_q = qa->offset - qa->slope * c;
    if (reduce_mod(pa->offset - off_q, l_dst) != 0) return false;
    p.len += q.len;
    return true;
  }
  const FlowChart& pc = std::get<FlowChart>(p.tf);
  const FlowChart* qc = std::get_if<FlowChart>(&q.tf);
  if (!qc) return false;
  // x^ -> chart_{qc}(x^ - c) + qc->post  ==  chart_{r+c, a+c, t}(x^) + qc->post - c
  if (pc.r != qc->r + c || pc.a != qc->a + c || pc.t != qc->t) return false;
  if (reduce_mod(pc.post - (qc->post - c), l_dst) != 0) return false;
  Rat lo = pc.r < pc.a ? pc.r : pc.a;
  Rat hi = pc.r < pc.a ? pc.a : pc.r;
  if (p.start < lo || p.start + p.len + q.len > hi) return false;
  p.len += q.len;
  return true;
}

PacMap::PacMap(Domain source, Domain target, std::vector<Piece> pieces)
    : PacMap(std::move(source), std::move(target), std::move(pieces), false) {}

PacMap::PacMap(Domain source, Domain target, std::vector<Piece> pieces,
               bool force_numeric)
    : source_(std::move(source)), target_(std::move(target)) {
  // Allow callers to hand in starts like l or small negatives of exact arithmetic.
  for (Piece& p : pieces)
    if (p.src_comp >= 0 && p.src_comp < source_.components()) {
      const Rat& l = source_.lens[static_cast<std::size_t>(p.src_comp)];
      if (l > 0) p.start = reduce_mod(p.start, l);
    }

  auto bad = check_map(source_, target_, pieces, force_numeric);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid piecewise map: " << bad.front();
    if (bad.size() > 1) msg << " (and " << bad.size() - 1 << " more)";
    throw validation_error(msg.str());
  }

  // A chart at time 0 is the identity plus its translation: fold into the affine
  // catalog so merging and equality see through the representation.
  for (Piece& p : pieces)
    if (const FlowChart* c = std::get_if<FlowChart>(&p.tf))
      if (c->t == 0) p.tf = Affine{1, c->post};

  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    if (x.src_comp != y.src_comp) return x.src_comp < y.src_comp;
    return x.start < y.start;
  });

  pieces_.clear();
  for (int c = 0; c < source_.components(); ++c) {
    const Rat& l = source_.lens[static_cast<std::size_t>(c)];
    std::vector<Piece> ps;
    for (const Piece& p : pieces)
      if (p.src_comp == c) ps.push_back(p);

    bool changed = true;
    while (changed && ps.size() > 1) {
      changed = false;
      for (std::size_t i = 0; i < ps.size() && ps.size() > 1; ++i) {
        std::size_t j = (i + 1) % ps.size();
        const Rat& ld = target_.lens[static_cast<std::size_t>(ps[i].dst_comp)];
        if (try_merge(ps[i], ps[j], l, ld)) {
          ps.erase(ps.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    }
    if (ps.size() == 1 && ps[0].len == l) {
      // Canonical anchor for a continuous component: start the single piece at 0.
      // For an affine piece the same coefficients represent the map in the new frame
      // because slope*l is an exact multiple of the target circumference.
      Piece& p = ps[0];
      if (const Affine* a = std::get_if<Affine>(&p.tf)) {
        const Rat& ld = target_.lens[static_cast<std::size_t>(p.dst_comp)];
        p.start = 0;
        p.tf = Affine{a->slope, reduce_mod(a->offset, ld)};
      }
    }
    for (Piece& p : ps) pieces_.push_back(std::move(p));
  }

  index_pieces();
  numeric_ = force_numeric || numeric_;
}

PacMap PacMap::with_numeric_constants(Domain source, Domain target,
                                      std::vector<Piece> pieces) {
  return PacMap(std::move(source), std::move(target), std::move(pieces), true);
}

PacMap PacMap::unchecked(Domain source, Domain target, std::vector<Piece> pieces) {
  PacMap m;
  m.source_ = std::move(source);
  m.target_ = std::move(target);
  m.pieces_ = std::move(pieces);
  m.comp_begin_.assign(static_cast<std::size_t>(m.source_.components()) + 1, 0);
  m.numeric_ = any_numeric(m.pieces_);
  return m;
}

void PacMap::index_pieces() {
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& x, const Piece& y) {
    if (x.src_comp != y.src_comp) return x.src_comp < y.src_comp;
    return x.start < y.start;
  });
  comp_begin_.assign(static_cast<std::size_t>(source_.components()) + 1, 0);
  for (const Piece& p : pieces_)
    ++comp_begin_[static_cast<std::size_t>(p.src_comp) + 1];
  for (std::size_t c = 1; c < comp_begin_.size(); ++c)
    comp_begin_[c] += comp_begin_[c - 1];
  numeric_ = any_numeric(pieces_);
}

PacMap PacMap::identity(const Domain& d) {
  std::vector<Piece> ps;
  for (int c = 0; c < d.components(); ++c)
    ps.push_back(Piece{c, 0, d.len(c), c, Affine{1, 0}});
  return PacMap(d, d, std::move(ps));
}

PacMap PacMap::rotation(const Rat& l, const Rat& angle) {
  Domain d = Domain::circle(l);
  std::vector<Piece> ps{Piece{0, 0, l, 0, Affine{1, reduce_mod(angle, l)}}};
  return PacMap(d, d, std::move(ps));
}

// ---------------------------------------------------------------------------
// Evaluation

PacMap::Located PacMap::locate(const DPoint& x) const {
  const Rat& l = source_.len(x.comp);
  Rat pos = reduce_mod(x.pos, l);
  int b = comp_begin_[static_cast<std::size_t>(x.comp)];
  int e = comp_begin_[static_cast<std::size_t>(x.comp) + 1];
  if (b == e) throw validation_error("component without pieces");
  auto first = pieces_.begin() + b;
  auto last = pieces_.begin() + e;
  auto it = std::upper_bound(first, last, pos, [](const Rat& v, const Piece& pc) {
    return v < pc.start;
  });
  int idx = (it == first) ? e - 1 : static_cast<int>(it - pieces_.begin()) - 1;
  const Piece& p = pieces_[static_cast<std::size_t>(idx)];
  Rat xhat = p.start + reduce_mod(pos - p.start, l);
  return Located{&p, xhat};
}

DPoint PacMap::evaluate(const DPoint& x) const {
  Located loc = locate(x);
  Rat y = transform_apply(loc.piece->tf, loc.xhat);
  return make_dpoint(target_, loc.piece->dst_comp, y);
}

Rat PacMap::evaluate_circle(const Rat& x) const {
  if (source_.components() != 1 || target_.components() != 1)
    throw validation_error("evaluate_circle needs single-circle source and target");
  DPoint p;
  p.comp = 0;
  p.pos = reduce_mod(x, source_.lens[0]);
  return evaluate(p).pos;
}

const Piece& PacMap::prev_piece(const Piece& p) const {
  int b = comp_begin_[static_cast<std::size_t>(p.src_comp)];
  int e = comp_begin_[static_cast<std::size_t>(p.src_comp) + 1];
  int idx = static_cast<int>(&p - pieces_.data());
  return pieces_[static_cast<std::size_t>(idx == b ? e - 1 : idx - 1)];
}

DPoint PacMap::left_limit(const DPoint& x) const {
  Located loc = locate(x);
  if (loc.xhat != loc.piece->start) {
    Rat y = transform_apply(loc.piece->tf, loc.xhat);
    return make_dpoint(target_, loc.piece->dst_comp, y);
  }
  const Piece& prev = prev_piece(*loc.piece);
  Rat y = transform_apply(prev.tf, prev.start + prev.len);
  return make_dpoint(target_, prev.dst_comp, y);
}

// ---------------------------------------------------------------------------
// Group operations

PacMap PacMap::inverse() const {
  struct Raw {
    int comp;
    Rat beta;
    int dst;
    Transform inv;
  };
  std::vector<Raw> raw;
  raw.reserve(pieces_.size());
  for (const Piece& p : pieces_) {
    const Rat& ld = target_.len(p.dst_comp);
    Rat y0 = piece_image(p).first;
    Rat beta = reduce_mod(y0, ld);
    Rat k = y0 - beta;  // exact multiple of ld
    Transform inv;
    if (const Affine* a = std::get_if<Affine>(&p.tf)) {
      inv = Affine{1 / a->slope, (k - a->offset) / a->slope};
    } else {
      const FlowChart& c = std::get<FlowChart>(p.tf);
      inv = FlowChart{c.r + c.post - k, c.a + c.post - k, -c.t, k - c.post};
    }
    raw.push_back(Raw{p.dst_comp, std::move(beta), p.src_comp, std::move(inv)});
  }
  // Adjacent images of a numeric map are computed independently in double
  // precision and can misalign by ulps, so each new arc runs to the next image
  // start rather than to this piece's own image end: the new source then tiles
  // exactly. For exact maps the two agree.
  std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) {
    return x.comp != y.comp ? x.comp < y.comp : x.beta < y.beta;
  });
  std::vector<Piece> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Rat len;
    if (i + 1 < raw.size() && raw[i + 1].comp == raw[i].comp) {
      len = raw[i + 1].beta - raw[i].beta;
    } else {
      std::size_t first = i;
      while (first > 0 && raw[first - 1].comp == raw[i].comp) --first;
      len = target_.len(raw[i].comp) - raw[i].beta + raw[first].beta;
    }
    out.push_back(
        Piece{raw[i].comp, raw[i].beta, std::move(len), raw[i].dst, raw[i].inv});
  }
  return PacMap(target_, source_, std::move(out), numeric_);
}

PacMap compose(const PacMap& f, const PacMap& g) {
  if (!(g.target() == f.source()))
    throw validation_error("compose: inner map's target must match outer map's source");
  const Domain& mid = f.source();
  std::vector<Piece> out;

  for (const Piece& P : g.pieces()) {
    const Rat& l_src = g.source().len(P.src_comp);
    const Rat& lB = mid.len(P.dst_comp);
    auto [y0, y1] = g.piece_image(P);

    // Cut the piece wherever its image crosses a boundary of f.
    std::vector<Rat> cuts;
    int b = f.comp_begin_[static_cast<std::size_t>(P.dst_comp)];
    int e = f.comp_begin_[static_cast<std::size_t>(P.dst_comp) + 1];
    for (int i = b; i < e; ++i) {
      Rat bhat = y0 + reduce_mod(f.pieces_[static_cast<std::size_t>(i)].start - y0, lB);
      if (bhat > y0 && bhat < y1) {
        Rat x = transform_invert_value(P.tf, bhat);
        if (x > P.start && x < P.start + P.len) cuts.push_back(x);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Rat> bounds;
    bounds.push_back(P.start);
    for (const Rat& c : cuts) bounds.push_back(c);
    bounds.push_back(P.start + P.len);

    // Chart inversions are double-precision, so a cut whose true position is an
    // existing bound comes back off by ulps and would carve a sliver cell whose
    // midpoint then falls on the wrong side of the boundary of f. Coalesce such
    // cuts into their neighbor; 1e-12 is far above rounding noise and far below
    // any genuine cell of the maps this library builds.
    if (!transform_is_affine(P.tf)) {
      const Rat sliver = rat_of_double(1e-12);
      std::vector<Rat> kept;
      kept.push_back(bounds.front());
      for (std::size_t k = 1; k + 1 < bounds.size(); ++k)
        if (bounds[k] - kept.back() > sliver &&
            bounds.back() - bounds[k] > sliver)
          kept.push_back(bounds[k]);
      kept.push_back(bounds.back());
      bounds = std::move(kept);
    }

    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
      const Rat& u = bounds[k];
      const Rat& v = bounds[k + 1];
      if (v <= u) continue;
      Rat mhat = (u + v) / 2;
      Rat ym = transform_apply(P.tf, mhat);
      DPoint yred = make_dpoint(mid, P.dst_comp, ym);
      PacMap::Located loc = f.locate(yred);
      Rat shift = ym - loc.xhat;  // exact multiple of lB
      Transform comb = combine_transforms(loc.piece->tf, shift, P.tf);

      Piece np;
      np.src_comp = P.src_comp;
      np.dst_comp = loc.piece->dst_comp;
      np.len = v - u;
      if (u >= l_src) {  // cell starts past the wrap point: re-anchor its frame
        np.start = u - l_src;
        np.tf = shift_frame(comb, l_src);
      } else {
        np.start = u;
        np.tf = comb;
      }
      out.push_back(std::move(np));
    }
  }
  return PacMap(g.source(), f.target(), std::move(out), f.numeric_ || g.numeric_);
}

// ---------------------------------------------------------------------------
// Discontinuity bookkeeping

std::vector<DPoint> PacMap::bp0(double eps) const {
  bool exact;
  Rat eps_r = 0;
  if (eps < 0) {
    exact = !numeric_;
    if (!exact) eps_r = rat_of_double(kAutoNumericEps);
  } else if (eps == 0) {
    exact = true;
  } else {
    exact = false;
    eps_r = rat_of_double(eps);
  }

  std::vector<DPoint> out;
  for (const Piece& p : pieces_) {
    Rat value = transform_apply(p.tf, p.start);
    DPoint v = make_dpoint(target_, p.dst_comp, value);
    const Piece& prev = prev_piece(p);
    Rat lim = transform_apply(prev.tf, prev.start + prev.len);
    DPoint L = make_dpoint(target_, prev.dst_comp, lim);
    bool jump;
    if (v.comp != L.comp) {
      jump = true;
    } else {
      Rat gap = circle_dist(v.pos, L.pos, target_.len(v.comp));
      jump = exact ? gap != 0 : gap > eps_r;
    }
    if (jump) out.push_back(DPoint{p.src_comp, p.start});
  }
  return out;  // pieces_ sorted by (comp, start) => points sorted per component
}

int PacMap::sharp(double eps) const { return static_cast<int>(bp0(eps).size()); }

bool PacMap::is_continuous(double eps) const { return bp0(eps).empty(); }

static void require_self_circle(const PacMap& m) {
  if (m.source().components() != 1 || !(m.source() == m.target()))
    throw validation_error("operation requires a circle self-map");
}

Rat PacMap::delta_f_at(const Rat& p, double eps) const {
  require_self_circle(*this);
  const Rat& l = source_.lens[0];
  Rat pr = reduce_mod(p, l);
  std::vector<Rat> others;
  for (const DPoint& q : bp0(eps))
    if (q.pos != pr) others.push_back(q.pos);
  if (others.empty()) return l;
  Rat d = dist_to_set(pr, others, l);
  return d < l ? d : l;
}

Rat PacMap::delta_f(double eps) const {
  require_self_circle(*this);
  const Rat& l = source_.lens[0];
  auto b = bp0(eps);
  if (b.size() < 2) return l;
  std::vector<Rat> pts;
  pts.reserve(b.size());
  for (const DPoint& q : b) pts.push_back(q.pos);
  Rat m = min_pairwise_dist(pts, l);
  return m < l ? m : l;
}

std::vector<Arc> PacMap::continuity_intervals(double eps) const {
  require_self_circle(*this);
  const Rat& l = source_.lens[0];
  auto b = bp0(eps);
  if (b.empty()) return {make_arc(0, l, l)};
  std::vector<Arc> out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Rat& cur = b[i].pos;
    const Rat& nxt = b[(i + 1) % b.size()].pos;
    Rat len = reduce_mod(nxt - cur, l);
    if (len == 0) len = l;  // single discontinuity point
    out.push_back(make_arc(cur, len, l));
  }
  return out;
}

std::vector<Arc> PacMap::v_n(int n, double eps) const {
  require_self_circle(*this);
  if (n < 1) throw validation_error("v_n requires n >= 1");
  auto b = bp0(eps);
  if (b.empty()) return {};
  const Rat& l = source_.lens[0];
  Rat delta = l / (Rat(2) * n * (static_cast<int>(b.size()) + 1));
  std::vector<Arc> balls;
  balls.reserve(b.size());
  for (const DPoint& q : b) balls.push_back(ball(q.pos, delta, l));
  return merge_arcs(std::move(balls), l);
}

Rat PacMap::v_n_measure(int n, double eps) const {
  return arcs_total_measure(v_n(n, eps));
}

Rat PacMap::image_measure(const Arc& a, int comp) const {
  const Rat& l = source_.len(comp);
  if (a.length <= 0 || a.length > l) throw validation_error("invalid arc");
  Rat cur = reduce_mod(a.start, l);
  Rat end = cur + a.length;
  Rat total = 0;
  while (cur < end) {
    DPoint x;
    x.comp = comp;
    x.pos = reduce_mod(cur, l);
    Located loc = locate(x);
    Rat room = loc.piece->start + loc.piece->len - loc.xhat;
    Rat step = end - cur;
    if (room < step) step = room;
    Rat lo = transform_apply(loc.piece->tf, loc.xhat);
    Rat hi = transform_apply(loc.piece->tf, loc.xhat + step);
    total += hi - lo;
    cur += step;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Comparison

static bool rats_close(const Rat& x, const Rat& y, const Rat& tol) {
  Rat d = x - y;
  if (d < 0) d = -d;
  return d <= tol;
}

bool PacMap::equals(const PacMap& o, double tol) const {
  if (!(source_ == o.source_) || !(target_ == o.target_)) return false;
  if (pieces_.size() != o.pieces_.size()) return false;
  Rat tr = tol > 0 ? rat_of_double(tol) : Rat(0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    const Piece& q = o.pieces_[i];
    if (p.src_comp != q.src_comp || p.dst_comp != q.dst_comp) return false;
    const Rat& ls = source_.len(p.src_comp);
    const Rat& ld = target_.len(p.dst_comp);
    if (circle_dist(p.start, q.start, ls) > tr) return false;
    if (!rats_close(p.len, q.len, tr)) return false;
    const Affine* pa = std::get_if<Affine>(&p.tf);
    const Affine* qa = std::get_if<Affine>(&q.tf);
    if ((pa == nullptr) != (qa == nullptr)) return false;
    if (pa) {
      if (!rats_close(pa->slope, qa->slope, tr)) return false;
      if (circle_dist(pa->offset, qa->offset, ld) > tr) return false;
    } else {
      const FlowChart& pc = std::get<FlowChart>(p.tf);
      const FlowChart& qc = std::get<FlowChart>(q.tf);
      if (!rats_close(pc.r, qc.r, tr) || !rats_close(pc.a, qc.a, tr)) return false;
      if (std::abs(pc.t - qc.t) > tol) return false;
      if (circle_dist(pc.post, qc.post, ld) > tr) return false;
    }
  }
  return true;
}

}  // namespace circleflow
