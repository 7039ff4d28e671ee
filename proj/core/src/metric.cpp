#include "circleflow/metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "circleflow/errors.hpp"

namespace circleflow {

namespace {

void require_common_circles(const PacMap& f, const PacMap& g) {
  if (f.source().components() != 1 || f.target().components() != 1)
    throw validation_error("metric requires single-circle maps");
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw validation_error("metric requires maps with a common source and target circle");
}

// Piece starts of both maps, sorted and deduplicated: between consecutive entries
// each map is a single piece.
std::vector<Rat> refined_boundaries(const PacMap& f, const PacMap& g) {
  std::vector<Rat> bs;
  for (const Piece& p : f.pieces()) bs.push_back(p.start);
  for (const Piece& p : g.pieces()) bs.push_back(p.start);
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  return bs;
}

// One refined arc [u, v) with the single piece of each map covering it and the
// frame offsets turning an absolute position into each piece's lifted coordinate.
struct RefinedArc {
  Rat u, v;
  const Piece* pf;
  const Piece* pg;
  Rat off_f;
  Rat off_g;
};

std::vector<RefinedArc> refine(const PacMap& f, const PacMap& g) {
  const Rat& l = f.source().lens[0];
  std::vector<Rat> bs = refined_boundaries(f, g);
  std::vector<RefinedArc> arcs;
  arcs.reserve(bs.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    RefinedArc a;
    a.u = bs[i];
    a.v = (i + 1 < bs.size()) ? bs[i + 1] : bs[0] + l;
    DPoint x{0, bs[i]};
    PacMap::Located lf = f.locate(x);
    PacMap::Located lg = g.locate(x);
    a.pf = lf.piece;
    a.pg = lg.piece;
    a.off_f = lf.xhat - a.u;
    a.off_g = lg.xhat - a.u;
    arcs.push_back(std::move(a));
  }
  return arcs;
}

Rat fold_dist(const Rat& h, const Rat& L) {
  Rat r = reduce_mod(h, L);
  Rat other = L - r;
  return r < other ? r : other;
}

// Positions in (u, v) where the affine function A + B*x crosses a multiple of L/2,
// ascending. Between consecutive crossings the folded distance is affine.
std::vector<Rat> half_level_crossings(const Rat& A, const Rat& B, const Rat& u,
                                      const Rat& v, const Rat& L) {
  std::vector<Rat> cuts;
  if (B == 0) return cuts;
  Rat hu = A + B * u;
  Rat hv = A + B * v;
  Rat lo = hu < hv ? hu : hv;
  Rat hi = hu < hv ? hv : hu;
  Rat half = L / 2;
  Int m = floor_rat(lo / half) + 1;
  for (; Rat(m) * half < hi; ++m) {
    Rat x = (Rat(m) * half - A) / B;
    if (x > u && x < v) cuts.push_back(x);
  }
  if (B < 0) std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

struct AffineOnArc {
  Rat A, B;  // h(x) = A + B*x on the arc, lifted
};

AffineOnArc lifted_difference(const RefinedArc& a) {
  const Affine& tf = std::get<Affine>(a.pf->tf);
  const Affine& tg = std::get<Affine>(a.pg->tf);
  // F(x) = tf.slope*(x + off_f) + tf.offset, G likewise.
  AffineOnArc h;
  h.B = tf.slope - tg.slope;
  h.A = tf.slope * a.off_f + tf.offset - (tg.slope * a.off_g + tg.offset);
  return h;
}

MetricValue exact_d_tilde1(const PacMap& f, const PacMap& g) {
  const Rat& L = f.target().lens[0];
  Rat total = 0;
  for (const RefinedArc& a : refine(f, g)) {
    AffineOnArc h = lifted_difference(a);
    std::vector<Rat> cells{a.u};
    for (Rat& c : half_level_crossings(h.A, h.B, a.u, a.v, L))
      cells.push_back(std::move(c));
    cells.push_back(a.v);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      Rat pu = fold_dist(h.A + h.B * cells[i], L);
      Rat pv = fold_dist(h.A + h.B * cells[i + 1], L);
      total += (cells[i + 1] - cells[i]) * (pu + pv) / 2;
    }
  }
  MetricValue mv;
  mv.exact = true;
  mv.value = total;
  mv.approx = to_double(total);
  mv.err = 0;
  return mv;
}

// --- numeric path -----------------------------------------------------------

struct TfD {
  bool affine;
  double a = 0, b = 0;             // affine slope/offset
  double r = 0, at = 0, et = 1;    // chart endpoints and e^t
  double post = 0;
};

TfD tfd_of(const Transform& tf) {
  TfD d;
  if (const Affine* af = std::get_if<Affine>(&tf)) {
    d.affine = true;
    d.a = to_double(af->slope);
    d.b = to_double(af->offset);
    return d;
  }
  const FlowChart& c = std::get<FlowChart>(tf);
  d.affine = false;
  d.r = to_double(c.r);
  d.at = to_double(c.a);
  d.et = std::exp(c.t);
  d.post = to_double(c.post);
  return d;
}

double tfd_apply(const TfD& d, double x) {
  if (d.affine) return d.a * x + d.b;
  double u = (x - d.r) / (d.at - x);
  double w = u * d.et;
  double y = d.r + (d.at - d.r) * (w / (1.0 + w));
  if (!std::isfinite(y)) y = d.at;
  double lo = std::min(d.r, d.at);
  double hi = std::max(d.r, d.at);
  return std::min(std::max(y, lo), hi) + d.post;
}

double fold_dist_double(double h, double L) {
  double r = std::fmod(h, L);
  if (r < 0) r += L;
  return std::min(r, L - r);
}

// Collect positions where floor(h/(L/2)) changes, bisecting sampled sign changes.
void collect_crossings(const std::function<double(double)>& h, double x0, double x1,
                       double m0, double m1, double half, int depth,
                       std::vector<double>& out) {
  if (std::floor(m0) == std::floor(m1)) return;
  if (x1 - x0 <= 1e-13 || depth > 60) {
    out.push_back((x0 + x1) / 2);
    return;
  }
  double xm = (x0 + x1) / 2;
  double mm = h(xm) / half;
  collect_crossings(h, x0, xm, m0, mm, half, depth + 1, out);
  collect_crossings(h, xm, x1, mm, m1, half, depth + 1, out);
}

double adaptive_simpson(const std::function<double(double)>& phi, double a, double fa,
                        double b, double fb, double fm, double whole, double eps,
                        int depth, double& err) {
  double m = (a + b) / 2;
  double lm = (a + m) / 2, rm = (m + b) / 2;
  double flm = phi(lm), frm = phi(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth >= 30 || std::abs(delta) <= 15 * eps) {
    err += std::abs(delta) / 15;
    return left + right + delta / 15;
  }
  return adaptive_simpson(phi, a, fa, m, fm, flm, left, eps / 2, depth + 1, err) +
         adaptive_simpson(phi, m, fm, b, fb, frm, right, eps / 2, depth + 1, err);
}

MetricValue numeric_d_tilde1(const PacMap& f, const PacMap& g) {
  const double l = to_double(f.source().lens[0]);
  const double L = to_double(f.target().lens[0]);
  const double half = L / 2;
  double total = 0;
  double err = 0;
  long crossings = 0;

  for (const RefinedArc& a : refine(f, g)) {
    double u = to_double(a.u), v = to_double(a.v);
    if (v <= u) continue;
    TfD tf = tfd_of(a.pf->tf);
    TfD tg = tfd_of(a.pg->tf);
    double off_f = to_double(a.off_f), off_g = to_double(a.off_g);
    auto h = [&](double x) { return tfd_apply(tf, x + off_f) - tfd_apply(tg, x + off_g); };
    auto phi = [&](double x) { return fold_dist_double(h(x), L); };

    // Locate kinks of phi (h crossing multiples of L/2), then integrate the
    // smooth cells adaptively.
    std::vector<double> cuts;
    constexpr int kSamples = 32;
    double prev_x = u, prev_m = h(u) / half;
    for (int i = 1; i <= kSamples; ++i) {
      double x = u + (v - u) * i / kSamples;
      double m = h(x) / half;
      collect_crossings(h, prev_x, x, prev_m, m, half, 0, cuts);
      prev_x = x;
      prev_m = m;
    }
    std::sort(cuts.begin(), cuts.end());
    crossings += static_cast<long>(cuts.size());

    std::vector<double> cells{u};
    for (double c : cuts)
      if (c > cells.back() && c < v) cells.push_back(c);
    cells.push_back(v);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      double x0 = cells[i], x1 = cells[i + 1];
      double f0 = phi(x0), f1 = phi(x1), fm = phi((x0 + x1) / 2);
      double whole = (x1 - x0) / 6 * (f0 + 4 * fm + f1);
      double eps = 1e-12 * (x1 - x0) / l + 1e-16;
      total += adaptive_simpson(phi, x0, f0, x1, f1, fm, whole, eps, 0, err);
    }
  }

  MetricValue mv;
  mv.exact = false;
  mv.value = 0;
  mv.approx = total;
  mv.err = err + static_cast<double>(crossings) * L * 1e-13 + 1e-15;
  return mv;
}

}  // namespace

MetricValue d_tilde1(const PacMap& f, const PacMap& g) {
  require_common_circles(f, g);
  if (!f.numeric() && !g.numeric()) return exact_d_tilde1(f, g);
  return numeric_d_tilde1(f, g);
}

MetricValue metric_d(const PacMap& f, const PacMap& g) {
  MetricValue a = d_tilde1(f, g);
  MetricValue b = d_tilde1(f.inverse(), g.inverse());
  MetricValue mv;
  mv.exact = a.exact && b.exact;
  mv.value = mv.exact ? a.value + b.value : Rat(0);
  mv.approx = a.approx + b.approx;
  mv.err = a.err + b.err;
  return mv;
}

Rat measure_U(const PacMap& f, const PacMap& g, const Rat& delta) {
  require_common_circles(f, g);
  if (f.numeric() || g.numeric())
    throw validation_error("measure_U requires affine-only maps");
  if (delta < 0) throw validation_error("measure_U requires delta >= 0");
  const Rat& L = f.target().lens[0];
  Rat total = 0;
  for (const RefinedArc& a : refine(f, g)) {
    AffineOnArc h = lifted_difference(a);
    std::vector<Rat> cells{a.u};
    for (Rat& c : half_level_crossings(h.A, h.B, a.u, a.v, L))
      cells.push_back(std::move(c));
    cells.push_back(a.v);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      const Rat& cu = cells[i];
      const Rat& cv = cells[i + 1];
      Rat pu = fold_dist(h.A + h.B * cu, L);
      Rat pv = fold_dist(h.A + h.B * cv, L);
      // The folded distance is affine on the cell, so endpoint values decide.
      if (pu > delta && pv > delta) {
        total += cv - cu;
      } else if (pu > delta || pv > delta) {
        Rat cross = cu + (delta - pu) * (cv - cu) / (pv - pu);
        total += pu > delta ? cross - cu : cv - cross;
      }
    }
  }
  return total;
}

Rat measure_U_n(const PacMap& f, const PacMap& g, int n) {
  if (n < 1) throw validation_error("measure_U_n requires n >= 1");
  MetricValue dt = d_tilde1(f, g);
  if (!dt.exact) throw validation_error("measure_U_n requires affine-only maps");
  return measure_U(f, g, Rat(n) * dt.value);
}

double quad_oracle_d_tilde1(const PacMap& f, const PacMap& g, long samples) {
  require_common_circles(f, g);
  if (samples < 1) throw validation_error("quad_oracle_d_tilde1 requires samples >= 1");
  const double l = to_double(f.source().lens[0]);
  const double L = to_double(f.target().lens[0]);
  double total = 0, comp = 0;  // Kahan-compensated accumulation
  for (const RefinedArc& a : refine(f, g)) {
    double u = to_double(a.u), v = to_double(a.v);
    double w = v - u;
    if (w <= 0) continue;
    long n = std::max(1L, std::lround(static_cast<double>(samples) * w / l));
    double hstep = w / static_cast<double>(n);
    TfD tf = tfd_of(a.pf->tf);
    TfD tg = tfd_of(a.pg->tf);
    double off_f = to_double(a.off_f), off_g = to_double(a.off_g);
    for (long j = 0; j < n; ++j) {
      double x = u + (static_cast<double>(j) + 0.5) * hstep;
      double d = fold_dist_double(tfd_apply(tf, x + off_f) - tfd_apply(tg, x + off_g), L);
      double term = d * hstep - comp;
      double next = total + term;
      comp = (next - total) - term;
      total = next;
    }
  }
  return total;
}

bool measure_distortion_check(const PacMap& g, const Arc& I) {
  if (g.source().components() != 1 || !(g.source() == g.target()))
    throw validation_error("measure_distortion_check requires a circle self-map");
  const Rat& l = g.source().lens[0];
  if (I.length > l / 2)
    throw validation_error("measure_distortion_check requires mu(I) <= l/2");
  Rat diff = I.length - g.image_measure(I, 0);
  if (diff < 0) diff = -diff;
  Rat bound = diff * diff / 8;
  MetricValue dv = metric_d(g, PacMap::identity(g.source()));
  if (dv.exact) return dv.value >= bound;
  return dv.approx + dv.err + 1e-12 >= to_double(bound);
}

}  // namespace circleflow
