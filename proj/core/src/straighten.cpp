#include "circleflow/straighten.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "circleflow/log.hpp"

namespace circleflow {

namespace {

void require_circle_family(const Flow& fam) {
  if (fam.domain.components() != 1)
    throw validation_error("straightening requires a single-circle family");
}

Rat dyadic_scale(const Rat& t0, int q) { return t0 / Rat(Int(1) << q); }

// Nearest point of a nonempty set, by circle distance.
std::pair<Rat, Rat> nearest_point(const std::vector<Rat>& pts, const Rat& x, const Rat& l) {
  Rat best_d = -1;
  Rat best_p = 0;
  for (const Rat& p : pts) {
    Rat d = circle_dist(p, x, l);
    if (best_d < 0 || d < best_d) {
      best_d = d;
      best_p = p;
    }
  }
  return {best_p, best_d};
}

}  // namespace

int cut_arc_index(const CutSet& cuts, const Rat& x) {
  if (cuts.points.empty()) throw validation_error("empty cut set");
  Rat pos = reduce_mod(x, cuts.l);
  auto it = std::upper_bound(cuts.points.begin(), cuts.points.end(), pos);
  if (it == cuts.points.begin()) return static_cast<int>(cuts.points.size()) - 1;
  return static_cast<int>(it - cuts.points.begin()) - 1;
}

Arc cut_arc(const CutSet& cuts, int i) {
  int n = static_cast<int>(cuts.points.size());
  if (i < 0 || i >= n) throw validation_error("cut arc index out of range");
  const Rat& b = cuts.points[static_cast<std::size_t>(i)];
  Rat len = n == 1 ? cuts.l
                   : reduce_mod(cuts.points[static_cast<std::size_t>((i + 1) % n)] - b, cuts.l);
  if (len == 0) len = cuts.l;
  return make_arc(b, len, cuts.l);
}

CutSet detect_cut_points(const Flow& fam, int q_max, double tol) {
  require_circle_family(fam);
  if (q_max < 3) throw validation_error("detect_cut_points requires q_max >= 3");
  if (!(tol >= 0)) throw validation_error("detect_cut_points requires tol >= 0");
  const Rat l = fam.domain.len(0);
  const Rat tol_r = rat_of_double(tol);

  // Keep only parameters where the discontinuity count is locally maximal: the
  // count must not grow at the sampled relative perturbations (1 +- 2^-k).
  auto locally_maximal = [&](const Rat& t, int s) {
    for (int k = 1; k <= 4; ++k) {
      Rat eps = Rat(1) / Rat(Int(1) << k);
      if (fam.at(t * (1 + eps)).sharp() > s) return false;
      if (fam.at(t * (1 - eps)).sharp() > s) return false;
    }
    return true;
  };

  struct Sample {
    int q;
    std::vector<Rat> pts;  // breakpoints of fam(t_q) and fam(-t_q), merged
  };
  std::vector<Sample> samples;
  for (int q = 1; q <= q_max; ++q) {
    Rat tq = dyadic_scale(fam.t0, q);
    PacMap mp = fam.at(tq);
    PacMap mm = fam.at(-tq);
    if (!locally_maximal(tq, mp.sharp()) || !locally_maximal(-tq, mm.sharp())) {
      log_debug("cut detection: skipping q=" + std::to_string(q) +
                " (discontinuity count not locally maximal)");
      continue;
    }
    Sample s;
    s.q = q;
    for (const DPoint& p : mp.bp0()) s.pts.push_back(p.pos);
    for (const DPoint& p : mm.bp0()) s.pts.push_back(p.pos);
    std::sort(s.pts.begin(), s.pts.end());
    s.pts.erase(std::unique(s.pts.begin(), s.pts.end()), s.pts.end());
    samples.push_back(std::move(s));
  }

  std::vector<Rat> stable;
  int window_from = 1;
  if (!samples.empty()) {
    const Sample& last = samples.back();
    for (const Rat& p : last.pts) {
      // Walk the qualified samples from the smallest parameter backward and count
      // how long this breakpoint persists within tol.
      int window = 0;
      int from_q = last.q;
      for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
        auto [np, nd] = nearest_point(it->pts, p, l);
        (void)np;
        if (nd > tol_r) break;
        ++window;
        from_q = it->q;
      }
      if (window >= 3) {
        stable.push_back(p);
        // Earliest q from which every kept point is already stable.
        window_from = std::max(window_from, from_q);
      }
    }
  }
  std::sort(stable.begin(), stable.end());
  // Merge clusters within tol (distinct representations of one stable point).
  std::vector<Rat> merged;
  for (const Rat& p : stable)
    if (merged.empty() || circle_dist(merged.back(), p, l) > tol_r) merged.push_back(p);
  if (merged.size() > 1 && circle_dist(merged.front(), merged.back(), l) <= tol_r)
    merged.pop_back();

  if (merged.empty())
    throw no_cut_points_error("no cut points found: the family may be continuous");

  CutSet cuts;
  cuts.l = l;
  cuts.points = std::move(merged);
  cuts.delta_b = cuts.points.size() >= 2 ? min_pairwise_dist(cuts.points, l) : l;
  cuts.window_from = window_from;
  std::ostringstream msg;
  msg << "cut detection: " << cuts.points.size() << " stable points, window from q="
      << cuts.window_from;
  log_info(msg.str());
  return cuts;
}

std::vector<ClassifiedInterval> classify_intervals(const PacMap& m, const CutSet& cuts,
                                                   double eps) {
  if (m.source().components() != 1 || !(m.source() == m.target()) ||
      !(m.source().lens[0] == cuts.l))
    throw validation_error("classify_intervals requires a self-map of the cut circle");
  Rat near = cuts.delta_b / 8;
  for (const DPoint& p : m.bp0(eps)) {
    if (dist_to_set(p.pos, cuts.points, cuts.l) > near)
      throw validation_error("breakpoint " + format_rat(p.pos) +
                             " strays from the cut set");
  }
  std::vector<ClassifiedInterval> out;
  for (const Arc& a : m.continuity_intervals(eps)) {
    if (a.length <= cuts.delta_b / 4) {
      out.push_back({a, IntervalType::type1});
    } else if (a.length >= cuts.delta_b / 2) {
      out.push_back({a, IntervalType::type2});
    } else {
      throw parameter_too_large_error(
          "parameter not small enough: continuity interval of measure " +
          format_rat(a.length) + " falls in the classification gap");
    }
  }
  return out;
}

namespace {

// sigma and tau for one sign of the parameter.
void one_sided_jumps(const PacMap& m, const CutSet& cuts, double tol,
                     std::vector<int>& sigma, std::vector<int>& tau) {
  const int n = static_cast<int>(cuts.points.size());
  const Rat tol_r = rat_of_double(tol);
  sigma.resize(static_cast<std::size_t>(n));
  tau.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rat v = m.evaluate(DPoint{0, cuts.points[static_cast<std::size_t>(i)]}).pos;
    sigma[static_cast<std::size_t>(i)] = cut_arc_index(cuts, v);

    const Rat& next = cuts.points[static_cast<std::size_t>((i + 1) % n)];
    Rat lim = m.left_limit(DPoint{0, next}).pos;
    // A left limit landing on a cut point closes the arc that ends there.
    int snapped = -1;
    for (int j = 0; j < n; ++j) {
      if (circle_dist(lim, cuts.points[static_cast<std::size_t>(j)], cuts.l) <= tol_r) {
        snapped = j;
        break;
      }
    }
    tau[static_cast<std::size_t>(i)] =
        snapped >= 0 ? (snapped - 1 + n) % n : cut_arc_index(cuts, lim);
  }
}

struct CombinedJumps {
  std::vector<int> s1, t1, s2, t2, s, t;
};

CombinedJumps jumps_at(const Flow& fam, const CutSet& cuts, const Rat& t_q, double tol) {
  CombinedJumps j;
  one_sided_jumps(fam.at(t_q), cuts, tol, j.s1, j.t1);
  one_sided_jumps(fam.at(-t_q), cuts, tol, j.s2, j.t2);
  const int n = static_cast<int>(cuts.points.size());
  j.s.resize(static_cast<std::size_t>(n));
  j.t.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::size_t u = static_cast<std::size_t>(i);
    if (j.s1[u] != i && j.s2[u] != i)
      throw validation_error("cut set invalid: arc " + std::to_string(i) +
                             " jumps under both parameter signs");
    if (j.t1[u] != i && j.t2[u] != i)
      throw validation_error("cut set invalid: arc " + std::to_string(i) +
                             " left limit jumps under both parameter signs");
    j.s[u] = j.s1[u] != i ? j.s1[u] : (j.s2[u] != i ? j.s2[u] : i);
    j.t[u] = j.t1[u] != i ? j.t1[u] : (j.t2[u] != i ? j.t2[u] : i);
  }
  for (int i = 0; i < n; ++i) {
    std::size_t u = static_cast<std::size_t>(i);
    if (j.t[u] != i && j.s[static_cast<std::size_t>(j.t[u])] != i)
      throw validation_error("cut set invalid: jump maps are not inverse to each other");
    if (j.s[u] != i && j.t[static_cast<std::size_t>(j.s[u])] != i)
      throw validation_error("cut set invalid: jump maps are not inverse to each other");
  }
  return j;
}

}  // namespace

JumpMaps compute_jump_maps(const Flow& fam, const CutSet& cuts, const Rat& t_q,
                           double tol) {
  require_circle_family(fam);
  if (t_q <= 0) throw validation_error("compute_jump_maps requires t_q > 0");
  CombinedJumps a = jumps_at(fam, cuts, t_q, tol);
  CombinedJumps b = jumps_at(fam, cuts, t_q / 2, tol);
  if (a.s != b.s || a.t != b.t)
    throw parameter_too_large_error(
        "parameter not small enough: jump maps differ between t_q and t_q/2");
  JumpMaps jm;
  jm.sigma1 = std::move(a.s1);
  jm.tau1 = std::move(a.t1);
  jm.sigma2 = std::move(a.s2);
  jm.tau2 = std::move(a.t2);
  jm.sigma = std::move(a.s);
  jm.tau = std::move(a.t);
  jm.t_q = t_q;
  return jm;
}

OrbitDecomposition orbit_decomposition(const JumpMaps& jm) {
  const int n = static_cast<int>(jm.sigma.size());
  if (n == 0 || static_cast<int>(jm.tau.size()) != n)
    throw validation_error("inconsistent jump maps: empty or mismatched");
  auto at = [n](const std::vector<int>& v, int i) {
    if (i < 0 || i >= n) throw validation_error("inconsistent jump maps: index range");
    return v[static_cast<std::size_t>(i)];
  };

  OrbitDecomposition od;
  for (int i = 0; i < n; ++i)
    if (at(jm.sigma, i) == i) od.L.push_back(i);

  // Prop-5.21 shape: tau iterated from a sigma-fixed index must terminate in a
  // tau-fixed point before revisiting anything else.
  for (int i : od.L) {
    std::set<int> seen;
    int cur = i;
    while (seen.insert(cur).second) cur = at(jm.tau, cur);
    if (at(jm.tau, cur) != cur)
      throw validation_error("inconsistent jump maps: tau orbit of a fixed index "
                             "does not terminate at a fixed point");
  }

  // Orbits: connected components under sigma and tau.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    int id = static_cast<int>(groups.size());
    std::vector<int> todo{i};
    std::vector<int> members;
    comp[static_cast<std::size_t>(i)] = id;
    while (!todo.empty()) {
      int cur = todo.back();
      todo.pop_back();
      members.push_back(cur);
      for (int nxt : {at(jm.sigma, cur), at(jm.tau, cur)}) {
        if (comp[static_cast<std::size_t>(nxt)] < 0) {
          comp[static_cast<std::size_t>(nxt)] = id;
          todo.push_back(nxt);
        } else if (comp[static_cast<std::size_t>(nxt)] != id) {
          throw validation_error("inconsistent jump maps: overlapping orbits");
        }
      }
    }
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }

  // tau-orbit from a starting index: first-appearance order until a repeat.
  auto tau_chain = [&](int start) {
    std::vector<int> order;
    std::set<int> seen;
    int cur = start;
    while (seen.insert(cur).second) {
      order.push_back(cur);
      cur = at(jm.tau, cur);
    }
    return std::pair<std::vector<int>, int>(order, cur);  // cur = first repeat
  };

  for (const std::vector<int>& g : groups) {
    bool meets_L = false;
    for (int i : g)
      if (at(jm.sigma, i) == i) meets_L = true;
    if (!meets_L) {
      // sigma must act on this orbit as one full cycle with tau its inverse.
      int cur = at(jm.sigma, g.front());
      std::size_t steps = 1;
      while (cur != g.front()) {
        if (std::find(g.begin(), g.end(), cur) == g.end() || steps > g.size())
          throw validation_error("inconsistent jump maps: orbit without fixed "
                                 "indices is not a single cycle");
        if (at(jm.tau, at(jm.sigma, cur)) != cur)
          throw validation_error("inconsistent jump maps: tau is not inverse to sigma");
        cur = at(jm.sigma, cur);
        ++steps;
      }
      if (steps != g.size())
        throw validation_error("inconsistent jump maps: orbit without fixed "
                               "indices is not a single cycle");
      for (int i : g) od.S.push_back(i);
    }

    // Representative: smallest member whose tau chain enumerates the orbit,
    // ending either in a fixed point (chain shape) or back at the start (cycle).
    int rep = -1;
    std::vector<int> order;
    for (int cand : g) {
      auto [chain, repeat] = tau_chain(cand);
      if (chain.size() != g.size()) continue;
      bool chain_shape = at(jm.tau, chain.back()) == chain.back();
      bool cycle_shape = repeat == cand;
      if (chain_shape || cycle_shape) {
        rep = cand;
        order = std::move(chain);
        break;
      }
    }
    if (rep < 0)
      throw validation_error("inconsistent jump maps: no representative whose tau "
                             "orbit enumerates its orbit");
    od.reps.push_back(rep);
    od.orbits.push_back(std::move(order));
  }
  std::sort(od.S.begin(), od.S.end());

  // Order components by representative index.
  std::vector<std::size_t> perm(od.reps.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    return od.reps[x] < od.reps[y];
  });
  OrbitDecomposition sorted;
  sorted.L = od.L;
  sorted.S = od.S;
  for (std::size_t i : perm) {
    sorted.reps.push_back(od.reps[i]);
    sorted.orbits.push_back(od.orbits[i]);
  }

  std::size_t total = 0;
  for (const auto& g : sorted.orbits) total += g.size();
  if (total != static_cast<std::size_t>(n))
    throw validation_error("inconsistent jump maps: orbits do not partition the arcs");
  return sorted;
}

std::pair<Domain, PacMap> build_domain_and_conjugator(const CutSet& cuts,
                                                      const OrbitDecomposition& od) {
  const int n = static_cast<int>(cuts.points.size());
  std::vector<Rat> mu(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] = cut_arc(cuts, i).length;

  std::vector<Rat> lambda;
  std::vector<Piece> pieces;
  for (std::size_t j = 0; j < od.orbits.size(); ++j) {
    Rat prefix = 0;
    for (int idx : od.orbits[j]) {
      const Rat& b = cuts.points[static_cast<std::size_t>(idx)];
      const Rat& len = mu[static_cast<std::size_t>(idx)];
      pieces.push_back(Piece{0, b, len, static_cast<int>(j), Affine{1, prefix - b}});
      prefix += len;
    }
    lambda.push_back(prefix);
  }
  Domain dom = make_domain(lambda);
  PacMap f(Domain::circle(cuts.l), dom, std::move(pieces));
  return {std::move(dom), std::move(f)};
}

VerificationReport verify_conjugate_continuity(const Domain& domain,
                                               const PacMap& conjugator,
                                               const Flow& fam,
                                               const std::vector<Rat>& ts,
                                               double tol, int grid) {
  VerificationReport rep;
  rep.tol = tol;
  rep.passed = true;
  PacMap f_inv = conjugator.inverse();
  for (const Rat& t : ts) {
    VerificationEntry e;
    e.t = t;
    PacMap g = compose(compose(conjugator, fam.at(t)), f_inv);

    bool invariant = true;
    for (const Piece& p : g.pieces())
      if (p.dst_comp != p.src_comp) invariant = false;
    for (int c = 0; invariant && c < domain.components(); ++c) {
      const Rat& len = domain.len(c);
      for (int k = 0; k < grid; ++k) {
        if (g.evaluate(DPoint{c, len * k / grid}).comp != c) {
          invariant = false;
          break;
        }
      }
    }
    e.invariant = invariant;

    for (const Piece& p : g.pieces()) {
      DPoint x{p.src_comp, p.start};
      DPoint v = g.evaluate(x);
      DPoint lim = g.left_limit(x);
      double res;
      if (v.comp != lim.comp)
        res = to_double(domain.len(v.comp)) / 2;  // worst case: jumped components
      else
        res = to_double(circle_dist(v.pos, lim.pos, domain.len(v.comp)));
      e.max_residual = std::max(e.max_residual, res);
      if (res > tol) ++e.residual_count;
    }
    if (!e.invariant || e.max_residual > tol) rep.passed = false;
    rep.entries.push_back(std::move(e));
  }
  std::ostringstream msg;
  if (rep.passed)
    msg << "conjugate is component-invariant and continuous at all " << ts.size()
        << " sampled parameters";
  else
    msg << "conjugate verification FAILED (see entries)";
  rep.message = msg.str();
  return rep;
}

StraighteningResult straighten(const Flow& fam, const StraightenConfig& cfg) {
  require_circle_family(fam);
  std::vector<Rat> hom_ts = cfg.hom_ts;
  if (hom_ts.empty())
    hom_ts = {Rat(1) / 4, Rat(-1) / 4, Rat(1) / 2, Rat(-1) / 2, Rat(3) / 4, Rat(1)};
  std::vector<Rat> verify_ts = cfg.verify_ts;
  if (verify_ts.empty())
    verify_ts = {Rat(-1) / 2,  Rat(-1) / 8,  Rat(-1) / 32,
                 Rat(1) / 32,  Rat(1) / 8,   Rat(1) / 2};

  HomReport hom = homomorphism_check(fam, hom_ts, cfg.tol);
  if (!hom.passed)
    throw validation_error("family fails the homomorphism precondition: " + hom.message);

  CutSet cuts;
  bool trivial = false;
  try {
    cuts = detect_cut_points(fam, cfg.q_max, cfg.tol);
  } catch (const no_cut_points_error& e) {
    log_info(std::string(e.what()) + "; straightening is trivial");
    trivial = true;
    cuts.l = fam.domain.len(0);
    cuts.points = {Rat(0)};
    cuts.delta_b = cuts.l;
    cuts.window_from = cfg.q_max;
  }

  if (trivial) {
    Domain dom = Domain::circle(cuts.l);
    PacMap f = PacMap::identity(dom);
    VerificationReport ver =
        verify_conjugate_continuity(dom, f, fam, verify_ts, cfg.tol, cfg.grid);
    JumpMaps jm;
    jm.sigma1 = jm.tau1 = jm.sigma2 = jm.tau2 = jm.sigma = jm.tau = {0};
    jm.t_q = dyadic_scale(fam.t0, cfg.q_max);
    OrbitDecomposition od;
    od.orbits = {{0}};
    od.reps = {0};
    od.L = {0};
    return StraighteningResult{true,  std::move(cuts), std::move(jm), std::move(od),
                               dom,   std::move(f),    std::move(hom), std::move(ver)};
  }

  JumpMaps jm;
  bool have_jm = false;
  std::string last_error;
  for (int q = std::max(1, cuts.window_from); q <= cfg.q_max; ++q) {
    Rat tq = dyadic_scale(fam.t0, q);
    try {
      classify_intervals(fam.at(tq), cuts);
      classify_intervals(fam.at(-tq), cuts);
      jm = compute_jump_maps(fam, cuts, tq, cfg.tol);
      have_jm = true;
      break;
    } catch (const parameter_too_large_error& e) {
      last_error = e.what();
      log_debug("straighten: q=" + std::to_string(q) + " rejected: " + last_error);
    }
  }
  if (!have_jm)
    throw parameter_too_large_error(
        last_error.empty() ? "parameter not small enough within q_max" : last_error);

  OrbitDecomposition od = orbit_decomposition(jm);
  auto [dom, f] = build_domain_and_conjugator(cuts, od);

  std::vector<Rat> all_ts = verify_ts;
  const std::vector<Rat> extras = {jm.t_q, Rat(-jm.t_q)};
  for (const Rat& extra : extras)
    if (std::find(all_ts.begin(), all_ts.end(), extra) == all_ts.end())
      all_ts.push_back(extra);
  VerificationReport ver =
      verify_conjugate_continuity(dom, f, fam, all_ts, cfg.tol, cfg.grid);

  return StraighteningResult{false, std::move(cuts), std::move(jm), std::move(od),
                             std::move(dom), std::move(f), std::move(hom),
                             std::move(ver)};
}

}  // namespace circleflow
