// Piecewise bijections of circles and domains: evaluation, one-sided limits,
// composition, inversion, normalization, and discontinuity bookkeeping.
#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circleflow/circle.hpp"
#include "circleflow/domain.hpp"

namespace circleflow {

// x^ -> slope*x^ + offset on lifted coordinates; slope > 0 (orientation preserving).
struct Affine {
  Rat slope;
  Rat offset;

  bool operator==(const Affine&) const = default;
};

// Time-t map of the two-fixed-point chart flow on the lifted interval between r and a,
// followed by an exact translation: x^ -> chart_{r,a,t}(x^) + post where
//   u = (x^-r)/(a-x^),  chart_{r,a,t}(x^) = r + (a-r) * u*e^t / (1 + u*e^t).
// Fixes r and a, is strictly increasing between them for either orientation of (r, a),
// and t-additivity chart_t . chart_s = chart_{t+s} holds on the nose. The endpoints and
// the translation are exact rationals so inversion and same-chart composition stay
// closed-form; interior values are computed in doubles and recorded as exact dyadics.
struct FlowChart {
  Rat r;       // repelling fixed point of the lifted flow for t > 0
  Rat a;       // attracting fixed point
  double t = 0;
  Rat post = 0;

  bool operator==(const FlowChart&) const = default;
};

using Transform = std::variant<Affine, FlowChart>;

bool transform_is_affine(const Transform& tf);
// Forward value at a lifted coordinate (exact for Affine and at chart fixed points).
Rat transform_apply(const Transform& tf, const Rat& xhat);
// Preimage of a lifted value (same exactness contract).
Rat transform_invert_value(const Transform& tf, const Rat& yhat);

struct Piece {
  int src_comp = 0;
  Rat start;     // in [0, source len of src_comp)
  Rat len;       // in (0, source len]; start+len may pass the wrap point
  int dst_comp = 0;
  Transform tf;  // acts on lifted coordinates x^ in [start, start+len]

  bool operator==(const Piece&) const = default;
};

// A piecewise bijection between domains. Construction validates that the source arcs
// tile the source, images tile the target (exactly for affine-only maps, within a fixed
// 1e-9 tolerance when flow charts are involved), slopes are positive and charts are
// increasing on their pieces; then adjacent pieces whose transforms continue each other
// are merged, so piece starts of a normalized map are exactly its discontinuity points
// plus, per component, transform-family changes and a position-0 marker for continuous
// components. Immutable afterwards.
class PacMap {
 public:
  PacMap(Domain source, Domain target, std::vector<Piece> pieces);

  static PacMap identity(const Domain& d);
  static PacMap rotation(const Rat& l, const Rat& angle);
  // No validation, no normalization; for feeding validate_report with broken data.
  static PacMap unchecked(Domain source, Domain target, std::vector<Piece> pieces);
  // Constructs while declaring that the constants already carry double-precision
  // noise, so image tiling is checked to the numeric tolerance even if every
  // piece is affine. Deserialization uses this to rebuild derived maps.
  static PacMap with_numeric_constants(Domain source, Domain target,
                                       std::vector<Piece> pieces);

  const Domain& source() const { return source_; }
  const Domain& target() const { return target_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  // True when double-precision arithmetic has entered the map's constants: it has a
  // flow-chart piece, or was derived (composed, inverted) from a map that had one.
  bool numeric() const { return numeric_; }

  DPoint evaluate(const DPoint& x) const;
  Rat evaluate_circle(const Rat& x) const;  // single-circle source and target only
  DPoint left_limit(const DPoint& x) const;

  PacMap inverse() const;

  // All invariant violations as human-readable strings; empty for a valid map.
  std::vector<std::string> validate_report() const;

  // Discontinuity set / count. eps < 0 selects the default tolerance: exact (0) for
  // affine-only maps, 1e-12 for maps with numeric pieces.
  std::vector<DPoint> bp0(double eps = -1) const;
  int sharp(double eps = -1) const;
  bool is_continuous(double eps = -1) const;

  // Single-circle self-maps only (source == target, one component).
  // delta_f: min(l, min distance between distinct discontinuity points); l if continuous.
  Rat delta_f(double eps = -1) const;
  Rat delta_f_at(const Rat& p, double eps = -1) const;
  // Maximal continuity intervals [p_i, p_{i+1}) in ascending order; full circle if continuous.
  std::vector<Arc> continuity_intervals(double eps = -1) const;
  // Union of open balls of radius l/(2n(sharp+1)) around the discontinuity points.
  std::vector<Arc> v_n(int n, double eps = -1) const;
  Rat v_n_measure(int n, double eps = -1) const;

  // Measure of the image of an arc living on source component comp.
  Rat image_measure(const Arc& a, int comp = 0) const;

  // Structural equality of normalized maps: exact when tol == 0, otherwise piece
  // boundaries, chart times and translation parts may differ by at most tol.
  bool equals(const PacMap& other, double tol = 0) const;

  // Lifted image interval [first, second) of a piece; second - first is its measure.
  std::pair<Rat, Rat> piece_image(const Piece& p) const;

  // Piece containing a point, with the point's lifted coordinate in the piece frame.
  struct Located {
    const Piece* piece;
    Rat xhat;
  };
  Located locate(const DPoint& x) const;

 private:
  PacMap() = default;
  // force_numeric marks a map derived from numeric inputs even if every piece
  // ends up affine, keeping the tolerant image-tiling rules for its offspring.
  PacMap(Domain source, Domain target, std::vector<Piece> pieces, bool force_numeric);

  Domain source_;
  Domain target_;
  std::vector<Piece> pieces_;       // sorted by (src_comp, start)
  std::vector<int> comp_begin_;     // size components+1; piece index ranges per component
  bool numeric_ = false;

  void index_pieces();
  const Piece& prev_piece(const Piece& p) const;
  friend PacMap compose(const PacMap& f, const PacMap& g);
};

// f after g; throws unless g's target equals f's source. Exact for affine-only inputs.
PacMap compose(const PacMap& f, const PacMap& g);

}  // namespace circleflow
