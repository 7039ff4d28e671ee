#include "circleflow/flows.hpp"

#include <sstream>

#include "circleflow/errors.hpp"
#include "circleflow/log.hpp"

namespace circleflow {

TorusParams make_torus_params(std::vector<Rat> lambda, std::vector<Rat> alpha) {
  if (lambda.empty() || lambda.size() != alpha.size())
    throw validation_error("torus params need matching nonempty lambda and alpha");
  Rat sum = 0;
  for (const Rat& l : lambda) {
    if (l <= 0) throw validation_error("torus block lengths must be positive");
    sum += l;
  }
  if (sum != 1) throw validation_error("torus block lengths must sum to 1");
  for (Rat& a : alpha) a = reduce_mod(a, 1);
  return TorusParams{std::move(lambda), std::move(alpha)};
}

PacMap standard_torus_action(const TorusParams& p, const Rat& t) {
  if (p.lambda.empty()) throw validation_error("empty torus params");
  std::vector<Piece> pieces;
  Rat beta = 0;
  for (std::size_t j = 0; j < p.lambda.size(); ++j) {
    const Rat& lam = p.lambda[j];
    Rat disp = lam * reduce_mod(t * p.alpha[j], 1);
    if (disp == 0) {
      pieces.push_back(Piece{0, beta, lam, 0, Affine{1, 0}});
    } else {
      pieces.push_back(Piece{0, beta, lam - disp, 0, Affine{1, disp}});
      pieces.push_back(Piece{0, beta + lam - disp, disp, 0, Affine{1, disp - lam}});
    }
    beta += lam;
  }
  Domain d = Domain::circle(1);
  return PacMap(d, d, std::move(pieces));
}

PacMap example31(int n) {
  if (n < 1) throw validation_error("example31 requires n >= 1");
  Domain d = Domain::circle(1);
  std::vector<Piece> pieces;
  Rat quarter = Rat(1) / 4;
  Rat step = Rat(1) / (4 * n);

  pieces.push_back(Piece{0, 0, quarter, 0, Affine{1, 0}});
  // n slots of [1/4, 1/2) compressed by half onto the left of each target slot.
  for (int k = 0; k < n; ++k) {
    Rat ak = quarter + Rat(k) * step;
    pieces.push_back(Piece{0, ak, step, 0, Affine{Rat(1) / 2, ak / 2}});
  }
  // [1/2, 1 - 1/(4n)) stretched onto [1/2, 1).
  {
    Rat slope = Rat(2 * n) / (2 * n - 1);
    Rat start = Rat(1) / 2;
    Rat len = Rat(1) / 2 - step;
    pieces.push_back(Piece{0, start, len, 0, Affine{slope, (1 - slope) / 2}});
  }
  // [1 - 1/(4n), 1) fanned out to fill the right half of each target slot.
  {
    Rat bstep = Rat(1) / (4 * n * n);
    Rat slope = Rat(n) / 2;
    for (int k = 0; k < n; ++k) {
      Rat bk = 1 - step + Rat(k) * bstep;
      Rat ak = quarter + Rat(k) * step;
      pieces.push_back(Piece{0, bk, bstep, 0, Affine{slope, ak + step / 2 - slope * bk}});
    }
  }
  return PacMap(d, d, std::move(pieces));
}

PacMap example41(int n) {
  if (n < 1) throw validation_error("example41 requires n >= 1");
  Domain d = Domain::circle(1);
  std::vector<Piece> pieces;
  Rat half = Rat(1) / Rat(Int(1) << (n + 1));
  int blocks = 1 << n;
  for (int k = 0; k < blocks; ++k) {
    Rat base = Rat(2 * k) * half;
    pieces.push_back(Piece{0, base, half, 0, Affine{1, half}});
    pieces.push_back(Piece{0, base + half, half, 0, Affine{1, -half}});
  }
  return PacMap(d, d, std::move(pieces));
}

PacMap cauchy46(int n) {
  if (n < 1) throw validation_error("cauchy46 requires n >= 1");
  Domain d = Domain::circle(1);
  std::vector<Piece> pieces;
  Rat low = Rat(1) / Rat(Int(1) << n);
  pieces.push_back(Piece{0, 0, low, 0, Affine{1, 0}});
  for (int k = n; k >= 1; --k) {
    Rat start = Rat(1) / Rat(Int(1) << k);
    Rat half = start / 2;  // half of the block [1/2^k, 1/2^{k-1})
    pieces.push_back(Piece{0, start, half, 0, Affine{1, half}});
    pieces.push_back(Piece{0, start + half, half, 0, Affine{1, -half}});
  }
  return PacMap(d, d, std::move(pieces));
}

PacMap example62(const Rat& t) {
  Rat abs_t = t < 0 ? -t : t;
  Int nfloor = floor_rat(abs_t);
  if (nfloor > 100000) throw validation_error("example62 parameter too large");
  int n = static_cast<int>(nfloor);
  Rat frac = reduce_mod(t, 1);
  Domain d = Domain::circle(1);
  if (n == 0 || frac == 0) return PacMap::identity(d);
  Rat lam = Rat(1) / n;
  Rat disp = frac / n;
  std::vector<Piece> pieces;
  for (int k = 0; k < n; ++k) {
    Rat base = Rat(k) / n;
    pieces.push_back(Piece{0, base, lam - disp, 0, Affine{1, disp}});
    pieces.push_back(Piece{0, base + lam - disp, disp, 0, Affine{1, disp - lam}});
  }
  return PacMap(d, d, std::move(pieces));
}

PacMap dyadic63_generator(int n) {
  if (n < 0) throw validation_error("dyadic63_generator requires n >= 0");
  Domain d = Domain::circle(1);
  if (n == 0) return PacMap::identity(d);
  std::vector<Piece> pieces;
  Rat low = Rat(1) / Rat(Int(1) << n);
  Rat rot = Rat(1) / Rat(Int(1) << (n + 1));
  pieces.push_back(Piece{0, 0, low, 0, Affine{1, 0}});
  for (int m = 1; m <= n; ++m) {
    Rat start = Rat(1) / Rat(Int(1) << m);  // block [1/2^m, 1/2^{m-1})
    Rat len = start;
    pieces.push_back(Piece{0, start, len - rot, 0, Affine{1, rot}});
    pieces.push_back(Piece{0, start + len - rot, rot, 0, Affine{1, rot - len}});
  }
  return PacMap(d, d, std::move(pieces));
}

static PacMap map_power(const PacMap& base, Int e) {
  PacMap result = PacMap::identity(base.source());
  if (e == 0) return result;
  PacMap b = e < 0 ? base.inverse() : base;
  if (e < 0) e = -e;
  while (e > 0) {
    if (e % 2 != 0) result = compose(b, result);
    e /= 2;
    if (e > 0) b = compose(b, b);
  }
  return result;
}

PacMap dyadic63(long m, int n) {
  return map_power(dyadic63_generator(n), Int(m));
}

Domain glued61_domain() {
  return make_domain({Rat(1) / 2, Rat(3) / 8, Rat(1) / 8});
}

PacMap glue61() {
  Domain src = glued61_domain();
  Domain dst = Domain::circle(1);
  std::vector<Piece> pieces{
      Piece{0, 0, Rat(1) / 4, 0, Affine{1, 0}},            // -> [0, 1/4)
      Piece{0, Rat(1) / 4, Rat(1) / 4, 0, Affine{1, Rat(3) / 8}},  // -> [5/8, 7/8)
      Piece{1, 0, Rat(3) / 8, 0, Affine{1, Rat(1) / 4}},   // -> [1/4, 5/8)
      Piece{2, 0, Rat(1) / 8, 0, Affine{1, Rat(7) / 8}},   // -> [7/8, 1)
  };
  return PacMap(src, dst, std::move(pieces));
}

PacMap psi61(const Rat& t) {
  Domain d = glued61_domain();
  double td = to_double(t);
  // Fixed points 1/8 and 3/8 on the first circle; for t > 0 points move toward
  // 1/8 on both sides (3/8 repels). The wrap arc [3/8, 1/2) ~ [3/8, 5/8) uses the
  // lifted copy 5/8 of the attractor.
  std::vector<Piece> pieces{
      Piece{0, 0, Rat(1) / 8, 0, FlowChart{Rat(-1) / 8, Rat(1) / 8, td, 0}},
      Piece{0, Rat(1) / 8, Rat(1) / 4, 0, FlowChart{Rat(3) / 8, Rat(1) / 8, td, 0}},
      Piece{0, Rat(3) / 8, Rat(1) / 8, 0, FlowChart{Rat(3) / 8, Rat(5) / 8, td, 0}},
      Piece{1, 0, Rat(3) / 8, 1, Affine{1, 0}},
      Piece{2, 0, Rat(1) / 8, 2, Affine{1, 0}},
  };
  return PacMap(d, d, std::move(pieces));
}

PacMap glued_flow61(const Rat& t) {
  static const PacMap h = glue61();
  static const PacMap h_inv = h.inverse();
  return compose(h, compose(psi61(t), h_inv));
}

Flow torus_flow(const TorusParams& p) {
  Flow f;
  f.name = "torus";
  f.domain = Domain::circle(1);
  f.declared_homomorphism = true;
  f.at = [p](const Rat& t) { return standard_torus_action(p, t); };
  return f;
}

Flow glued61_flow() {
  Flow f;
  f.name = "glued61";
  f.domain = Domain::circle(1);
  f.declared_homomorphism = true;
  f.at = [](const Rat& t) { return glued_flow61(t); };
  return f;
}

Flow dyadic63_flow() {
  Flow f;
  f.name = "dyadic63";
  f.domain = Domain::circle(1);
  f.declared_homomorphism = true;
  f.at = [](const Rat& t) {
    Int num = numerator(t);
    Int den = denominator(t);
    int k = 0;
    while (den > 1) {
      if (den % 2 != 0)
        throw validation_error("dyadic63 flow is defined for dyadic times p/2^k only");
      den /= 2;
      ++k;
    }
    return map_power(dyadic63_generator(k), num);
  };
  return f;
}

Flow example62_flow() {
  Flow f;
  f.name = "example62";
  f.domain = Domain::circle(1);
  f.declared_homomorphism = false;
  f.at = [](const Rat& t) { return example62(t); };
  return f;
}

HomReport homomorphism_check(const Flow& fam, const std::vector<Rat>& ts, double tol) {
  if (fam.domain.components() != 1)
    throw validation_error("homomorphism_check requires a single-circle family");
  HomReport rep;
  PacMap id = PacMap::identity(fam.domain);

  {
    MetricValue dv = metric_d(fam.at(0), id);
    double defect = dv.exact ? to_double(dv.value) : dv.upper();
    rep.identity_ok = defect <= tol;
  }

  std::vector<PacMap> maps;
  maps.reserve(ts.size());
  for (const Rat& t : ts) maps.push_back(fam.at(t));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      PacMap sum = fam.at(ts[i] + ts[j]);
      PacMap prod = compose(maps[i], maps[j]);
      MetricValue dv = metric_d(sum, prod);
      double defect = dv.exact ? to_double(dv.value) : dv.upper();
      if (defect > rep.max_defect) {
        rep.max_defect = defect;
        rep.worst_s = ts[i];
        rep.worst_t = ts[j];
      }
    }
  }

  for (int k = 0; k <= 8; ++k) {
    Rat tk = fam.t0 / Rat(Int(1) << k);
    MetricValue dv = metric_d(fam.at(tk), id);
    rep.continuity.emplace_back(tk, dv.exact ? to_double(dv.value) : dv.approx);
  }

  rep.passed = rep.identity_ok && rep.max_defect <= tol;
  std::ostringstream msg;
  if (rep.passed) {
    msg << "homomorphism law holds on " << ts.size() << "^2 pairs (max defect "
        << rep.max_defect << ")";
  } else if (!rep.identity_ok) {
    msg << "family does not evaluate to the identity at t = 0";
  } else {
    msg << "homomorphism defect " << rep.max_defect << " at (s, t) = ("
        << format_rat(rep.worst_s) << ", " << format_rat(rep.worst_t) << ")";
  }
  rep.message = msg.str();
  log_debug(rep.message);
  return rep;
}

}  // namespace circleflow
