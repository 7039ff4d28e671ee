#include "selftest_suite.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>
#include <vector>

#include "circleflow/flows.hpp"
#include "circleflow/metric.hpp"
#include "circleflow/pac_map.hpp"
#include "circleflow/random_maps.hpp"
#include "circleflow/straighten.hpp"

namespace circleflow::selftest {

namespace {

Rat pow2_inv(int n) { return Rat(1) / Rat(Int(1) << n); }

std::string rats(const std::vector<Rat>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_rat(v[i]);
  }
  return s + "}";
}

// --- criterion 1: half-swap involutions --------------------------------------

CriterionResult crit_involution_distances(std::uint64_t) {
  CriterionResult r;
  r.name = "half-swap involutions: d(f_n, id) = 1/2^n and #f_n = 2^(n+1), n = 1..10";
  PacMap id = PacMap::identity(Domain::circle(1));
  std::ostringstream bad;
  bool ok = true;
  for (int n = 1; n <= 10; ++n) {
    PacMap f = example41(n);
    if (f.sharp() != (1 << (n + 1))) {
      ok = false;
      bad << " #f_" << n << "=" << f.sharp();
    }
    MetricValue d = metric_d(f, id);
    if (!d.exact || d.value != pow2_inv(n)) {
      ok = false;
      bad << " d(f_" << n << ",id)=" << (d.exact ? format_rat(d.value) : "inexact");
    }
  }
  r.passed = ok;
  r.detail = ok ? "exact rational equality for every n" : "violations:" + bad.str();
  return r;
}

// --- criterion 2: asymmetric compressor --------------------------------------

CriterionResult crit_compressor_bounds(std::uint64_t) {
  CriterionResult r;
  r.name =
      "slot compressor: d~1(f_n, id) <= 1/(2n) while d~1(f_n^-1, id) >= 1/24, n = 2..8";
  PacMap id = PacMap::identity(Domain::circle(1));
  std::ostringstream bad;
  bool ok = true;
  for (int n = 2; n <= 8; ++n) {
    PacMap f = example31(n);
    MetricValue fwd = d_tilde1(f, id);
    MetricValue inv = d_tilde1(f.inverse(), id);
    if (!fwd.exact || !(fwd.value <= Rat(1) / (2 * Rat(n)))) {
      ok = false;
      bad << " fwd(n=" << n << ")=" << (fwd.exact ? format_rat(fwd.value) : "inexact");
    }
    if (!inv.exact || !(inv.value >= Rat(1) / 24)) {
      ok = false;
      bad << " inv(n=" << n << ")=" << (inv.exact ? format_rat(inv.value) : "inexact");
    }
  }
  r.passed = ok;
  r.detail = ok ? "exact bounds hold for every n" : "violations:" + bad.str();
  return r;
}

// --- criterion 3: dyadic block-rotation generators ----------------------------

CriterionResult crit_dyadic_generators(std::uint64_t) {
  CriterionResult r;
  r.name =
      "dyadic generators: d(id, rho(1/2^n)) <= 1/2^(n-1), #rho(1/2^n) = 2n, "
      "rho(1/2^n)^2 = rho(1/2^(n-1)), n = 1..10";
  PacMap id = PacMap::identity(Domain::circle(1));
  std::ostringstream bad;
  bool ok = true;
  for (int n = 1; n <= 10; ++n) {
    PacMap f = dyadic63_generator(n);
    MetricValue d = metric_d(f, id);
    if (!d.exact || !(d.value <= pow2_inv(n - 1))) {
      ok = false;
      bad << " d-bound(n=" << n << ")";
    }
    if (f.sharp() != 2 * n) {
      ok = false;
      bad << " #rho(1/2^" << n << ")=" << f.sharp() << " (claimed " << 2 * n << ")";
    }
    if (!compose(f, f).equals(dyadic63_generator(n - 1))) {
      ok = false;
      bad << " square-law(n=" << n << ")";
    }
  }
  r.passed = ok;
  r.detail = ok ? "all three laws hold for every n" : "violations:" + bad.str();
  return r;
}

// --- criterion 4: glued two-fixed-point family --------------------------------

CriterionResult crit_glued_straightening(std::uint64_t) {
  CriterionResult r;
  r.name =
      "glued-flow straightening: B = {0, 1/4, 5/8, 7/8}, lambda = (1/2, 3/8, 1/8), "
      "conjugate continuous within 1e-9 at t in {+-1/32, +-1/8, +-1/2}";
  StraighteningResult sr = straighten(glued61_flow());
  std::vector<Rat> want_b = {0, Rat(1) / 4, Rat(5) / 8, Rat(7) / 8};
  std::vector<Rat> want_l = {Rat(1) / 2, Rat(3) / 8, Rat(1) / 8};
  std::ostringstream bad;
  bool ok = true;
  if (sr.trivial) {
    ok = false;
    bad << " unexpected trivial result";
  }
  if (sr.cuts.points != want_b) {
    ok = false;
    bad << " B=" << rats(sr.cuts.points);
  }
  if (sr.domain.lens != want_l) {
    ok = false;
    bad << " lambda=" << rats(sr.domain.lens);
  }
  if (!sr.verification.passed || sr.verification.tol > 1e-9) {
    ok = false;
    bad << " verification: " << sr.verification.message;
  }
  double worst = 0;
  for (const VerificationEntry& e : sr.verification.entries)
    worst = std::max(worst, e.max_residual);
  r.passed = ok;
  std::ostringstream d;
  if (ok)
    d << "B and lambda exact, worst breakpoint residual " << worst << " over "
      << sr.verification.entries.size() << " parameters";
  else
    d << "violations:" << bad.str();
  r.detail = d.str();
  return r;
}

// --- criterion 5: torus action regression -------------------------------------

CriterionResult crit_torus_straightening(std::uint64_t) {
  CriterionResult r;
  r.name =
      "torus action (lambda = 1/3 each, alpha = (1/3, 0, 1/2)): cuts {0, 1/3, 2/3}, "
      "three 1/3-circles, conjugates are exact rotations";
  TorusParams p = make_torus_params({Rat(1) / 3, Rat(1) / 3, Rat(1) / 3},
                                    {Rat(1) / 3, Rat(0), Rat(1) / 2});
  Flow fam = torus_flow(p);
  StraighteningResult sr = straighten(fam);
  std::ostringstream bad;
  bool ok = true;
  if (sr.trivial) {
    ok = false;
    bad << " unexpected trivial result";
  }
  std::vector<Rat> want_b = {0, Rat(1) / 3, Rat(2) / 3};
  std::vector<Rat> want_l = {Rat(1) / 3, Rat(1) / 3, Rat(1) / 3};
  if (sr.cuts.points != want_b) {
    ok = false;
    bad << " B=" << rats(sr.cuts.points);
  }
  if (sr.domain.lens != want_l) {
    ok = false;
    bad << " lambda=" << rats(sr.domain.lens);
  }
  if (!sr.verification.passed) {
    ok = false;
    bad << " verification: " << sr.verification.message;
  }
  if (ok) {
    PacMap f_inv = sr.conjugator.inverse();
    const std::vector<Rat> ts = {Rat(1) / 8, Rat(1) / 3, Rat(7) / 16, Rat(-5) / 12};
    for (const Rat& t : ts) {
      PacMap g = compose(compose(sr.conjugator, fam.at(t)), f_inv);
      std::vector<Piece> want;
      for (int c = 0; c < sr.domain.components(); ++c) {
        Rat disp = p.lambda[static_cast<std::size_t>(c)] *
                   reduce_mod(t * p.alpha[static_cast<std::size_t>(c)], 1);
        want.push_back(Piece{c, 0, sr.domain.len(c), c,
                             Affine{1, reduce_mod(disp, sr.domain.len(c))}});
      }
      PacMap expected(sr.domain, sr.domain, std::move(want));
      if (!g.equals(expected)) {
        ok = false;
        bad << " conjugate at t=" << format_rat(t) << " is not the exact rotation";
      }
    }
  }
  r.passed = ok;
  r.detail = ok ? "cut set, domain and per-component rotations all exact"
               : "violations:" + bad.str();
  return r;
}

// --- criterion 6: randomized property suites ----------------------------------

struct SuiteTally {
  const char* name;
  int failures = 0;
};

CriterionResult crit_property_suites(std::uint64_t seed) {
  CriterionResult r;
  r.name = "property suites, 500 random piecewise-affine instances each, zero failures";
  Rng rng(seed);
  PacMap id = PacMap::identity(Domain::circle(1));

  SuiteTally group{"group-axioms"};
  SuiteTally metric{"metric-axioms"};
  SuiteTally isometry{"inversion-isometry"};
  SuiteTally bp_comp{"breakpoint-composition-laws"};
  SuiteTally bp_inv{"breakpoints-of-inverse"};
  SuiteTally u_meas{"superlevel-measure"};
  SuiteTally distort{"measure-distortion"};
  SuiteTally v_meas{"breakpoint-ball-measure"};

  const int kRounds = 500;
  for (int it = 0; it < kRounds; ++it) {
    PacMap f = random_aiet(rng, 6);
    PacMap g = random_aiet(rng, 6);
    PacMap h = random_aiet(rng, 6);

    // Group axioms: associativity, identity, inverses.
    {
      bool ok = compose(compose(f, g), h).equals(compose(f, compose(g, h))) &&
                compose(f, id).equals(f) && compose(id, f).equals(f) &&
                compose(f, f.inverse()).equals(id) &&
                compose(f.inverse(), f).equals(id);
      if (!ok) ++group.failures;
    }

    // Metric axioms.
    {
      MetricValue dfg = metric_d(f, g);
      MetricValue dgf = metric_d(g, f);
      MetricValue dff = metric_d(f, f);
      MetricValue dfh = metric_d(f, h);
      MetricValue dgh = metric_d(g, h);
      bool ok = dfg.exact && dfg.value >= 0 && dff.exact && dff.value == 0 &&
                dfg.value == dgf.value && dfh.value <= dfg.value + dgh.value;
      if (dfg.value == 0 && !f.equals(g)) ok = false;
      if (!ok) ++metric.failures;
    }

    // Inversion is an isometry of d.
    {
      MetricValue a = metric_d(f, g);
      MetricValue b = metric_d(f.inverse(), g.inverse());
      if (!(a.exact && b.exact && a.value == b.value)) ++isometry.failures;
    }

    // Breakpoints of a composition: containment and cardinality bounds.
    {
      PacMap fg = compose(f, g);
      PacMap g_inv = g.inverse();
      std::vector<Rat> allowed;
      for (const DPoint& p : g.bp0()) allowed.push_back(p.pos);
      for (const DPoint& p : f.bp0())
        allowed.push_back(g_inv.evaluate(DPoint{0, p.pos}).pos);
      bool ok = true;
      for (const DPoint& p : fg.bp0())
        if (std::find(allowed.begin(), allowed.end(), p.pos) == allowed.end())
          ok = false;
      int sf = f.sharp(), sg = g.sharp(), sfg = fg.sharp();
      if (!(std::abs(sf - sg) <= sfg && sfg <= sf + sg)) ok = false;
      if (!ok) ++bp_comp.failures;
    }

    // BP0(f^-1) = f(BP0(f)) as exact point sets.
    {
      std::vector<Rat> image;
      for (const DPoint& p : f.bp0()) image.push_back(f.evaluate(p).pos);
      std::sort(image.begin(), image.end());
      std::vector<Rat> inv_bp;
      for (const DPoint& p : f.inverse().bp0()) inv_bp.push_back(p.pos);
      std::sort(inv_bp.begin(), inv_bp.end());
      if (image != inv_bp) ++bp_inv.failures;
    }

    // Measure of the super-level set at threshold n * d~1 is at most 1/n.
    {
      bool ok = true;
      for (int n : {2, 5})
        if (!(measure_U_n(f, g, n) <= Rat(1) / n)) ok = false;
      if (!ok) ++u_meas.failures;
    }

    // d(g, id) dominates the squared measure distortion of an arc.
    {
      Arc I = random_arc(rng, 1);
      if (!measure_distortion_check(g, I)) ++distort.failures;
    }

    // Merged balls around breakpoints have measure at most 1/n.
    {
      bool ok = true;
      for (int n : {1, 3})
        if (!(f.v_n_measure(n) <= Rat(1) / n)) ok = false;
      if (!ok) ++v_meas.failures;
    }
  }

  std::ostringstream d;
  bool ok = true;
  for (const SuiteTally* s :
       {&group, &metric, &isometry, &bp_comp, &bp_inv, &u_meas, &distort, &v_meas}) {
    if (s->failures) {
      ok = false;
      d << " " << s->name << ": " << s->failures << "/" << kRounds << " failed;";
    }
  }
  r.passed = ok;
  r.detail = ok ? "8 suites x 500 instances, zero failures" : "failures:" + d.str();
  return r;
}

// --- criterion 7: integrator vs quadrature oracle ------------------------------

CriterionResult crit_oracle_agreement(std::uint64_t seed) {
  CriterionResult r;
  r.name =
      "exact integral vs midpoint quadrature (1e6 samples) within 1e-8, 100 random "
      "piecewise-affine pairs";
  Rng rng(seed + 1);
  double worst = 0;
  bool ok = true;
  for (int it = 0; it < 100; ++it) {
    PacMap f = random_aiet(rng, 6);
    PacMap g = random_aiet(rng, 6);
    MetricValue exact = d_tilde1(f, g);
    double est = quad_oracle_d_tilde1(f, g, 1000000);
    double diff = std::abs(to_double(exact.value) - est);
    worst = std::max(worst, diff);
    if (!exact.exact || diff > 1e-8) ok = false;
  }
  r.passed = ok;
  std::ostringstream d;
  d << "worst disagreement " << worst;
  r.detail = d.str();
  return r;
}

// --- criterion 8: non-completeness and unbounded discontinuity count -----------

CriterionResult crit_divergence_witnesses(std::uint64_t) {
  CriterionResult r;
  r.name =
      "Cauchy chain d(f_n, f_m) <= 1/2^(n-1) with strictly increasing #f_n (n < m <= 12); "
      "integer-snap family exceeds 64 discontinuities by t = 64";
  std::ostringstream bad;
  bool ok = true;
  std::vector<PacMap> chain;
  for (int n = 1; n <= 12; ++n) chain.push_back(cauchy46(n));
  for (std::size_t n = 0; n < chain.size(); ++n) {
    if (n + 1 < chain.size() &&
        !(chain[n].sharp() < chain[n + 1].sharp())) {
      ok = false;
      bad << " #f not strictly increasing at n=" << n + 1;
    }
    for (std::size_t m = n + 1; m < chain.size(); ++m) {
      MetricValue d = metric_d(chain[n], chain[m]);
      if (!d.exact || !(d.value <= pow2_inv(static_cast<int>(n)))) {
        ok = false;
        bad << " d(f_" << n + 1 << ",f_" << m + 1 << ")";
      }
    }
  }

  // The integer-snap family looks continuous pointwise near 0 ...
  PacMap id = PacMap::identity(Domain::circle(1));
  for (int k = 0; k <= 8; ++k) {
    MetricValue d = metric_d(example62(Rat(1) / Rat(Int(1) << (k + 2))), id);
    if (!(d.exact && d.value == 0)) {
      ok = false;
      bad << " snap family not identity at small t";
    }
  }
  // ... yet its discontinuity count escapes any bound K <= 64 somewhere by t = 64.
  int best = 0;
  Rat best_t = 0;
  for (int n = 33; n <= 64 && best <= 64; ++n) {
    Rat t = n + Rat(1) / 2;
    if (t > 64) break;
    int s = example62(t).sharp();
    if (s > best) {
      best = s;
      best_t = t;
    }
  }
  if (best <= 64) {
    ok = false;
    bad << " no parameter t <= 64 with #Phi(t) > 64 (best " << best << ")";
  }

  r.passed = ok;
  std::ostringstream d;
  if (ok)
    d << "66 Cauchy pairs exact; #Phi(" << format_rat(best_t) << ") = " << best;
  else
    d << "violations:" << bad.str();
  r.detail = d.str();
  return r;
}

struct Criterion {
  CriterionResult (*fn)(std::uint64_t);
  double time_limit;  // seconds; 0 = none
};

const Criterion kCriteria[] = {
    {crit_involution_distances, 1.0},
    {crit_compressor_bounds, 1.0},
    {crit_dyadic_generators, 0.0},
    {crit_glued_straightening, 10.0},
    {crit_torus_straightening, 0.0},
    {crit_property_suites, 0.0},
    {crit_oracle_agreement, 0.0},
    {crit_divergence_witnesses, 0.0},
};

}  // namespace

int criterion_count() { return static_cast<int>(std::size(kCriteria)); }

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > criterion_count())
    throw validation_error("criterion id out of range");
  const Criterion& c = kCriteria[id - 1];
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = c.fn(seed);
  auto t1 = std::chrono::steady_clock::now();
  r.id = id;
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  if (c.time_limit > 0 && r.seconds >= c.time_limit) {
    r.passed = false;
    std::ostringstream d;
    d << r.detail << "; EXCEEDED time limit " << c.time_limit << "s";
    r.detail = d.str();
  }
  return r;
}

int run_acceptance(std::uint64_t seed, std::ostream& out) {
  int failures = 0;
  for (int id = 1; id <= criterion_count(); ++id) {
    CriterionResult r = run_criterion(id, seed);
    if (!r.passed) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << "criterion " << r.id << ": " << (r.passed ? "PASS" : "FAIL") << "  "
         << r.name << " -- " << r.detail << " [" << r.seconds << "s]";
    out << line.str() << "\n";
  }
  out << "acceptance: " << (criterion_count() - failures) << "/" << criterion_count()
      << " criteria passed" << (failures ? " -- FAILURES PRESENT" : "") << "\n";
  return failures;
}

}  // namespace circleflow::selftest
