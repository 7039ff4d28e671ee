// Straightening pipeline: cut detection, interval classification, jump maps,
// orbit decomposition, conjugator construction, and end-to-end verification.
#include <doctest.h>

#include <set>
#include <vector>

#include "circleflow/errors.hpp"
#include "circleflow/flows.hpp"
#include "circleflow/straighten.hpp"

using namespace circleflow;

namespace {

Flow rotation_flow() {
  Flow f;
  f.name = "rotation";
  f.at = [](const Rat& t) { return PacMap::rotation(1, reduce_mod(t / 2, 1)); };
  return f;
}

std::vector<Rat> glued_cut_points() {
  return {0, Rat(1) / 4, Rat(5) / 8, Rat(7) / 8};
}

}  // namespace

TEST_SUITE("straighten") {

TEST_CASE("cut arcs index and cover the circle") {
  CutSet cuts{1, glued_cut_points(), Rat(1) / 8, 1};
  CHECK(cut_arc_index(cuts, Rat(1) / 8) == 0);
  CHECK(cut_arc_index(cuts, Rat(1) / 4) == 1);
  CHECK(cut_arc_index(cuts, Rat(15) / 16) == 3);
  Arc a1 = cut_arc(cuts, 1);
  CHECK(a1.start == Rat(1) / 4);
  CHECK(a1.length == Rat(3) / 8);
  Arc a3 = cut_arc(cuts, 3);  // [7/8, 1): wraps to the first cut
  CHECK(a3.length == Rat(1) / 8);

  Rat total = 0;
  for (int i = 0; i < 4; ++i) total += cut_arc(cuts, i).length;
  CHECK(total == 1);
}

TEST_CASE("detect_cut_points on the glued flow") {
  CutSet cuts = detect_cut_points(glued61_flow(), 8, 1e-9);
  CHECK(cuts.points == glued_cut_points());
  CHECK(cuts.delta_b == Rat(1) / 8);
}

TEST_CASE("detect_cut_points on a two-block torus flow") {
  TorusParams p = make_torus_params({Rat(1) / 2, Rat(1) / 2}, {Rat(1) / 3, Rat(1) / 7});
  CutSet cuts = detect_cut_points(torus_flow(p), 8, 1e-9);
  CHECK(cuts.points == std::vector<Rat>{0, Rat(1) / 2});
  CHECK(cuts.delta_b == Rat(1) / 2);
}

TEST_CASE("detect_cut_points rejects continuous families") {
  CHECK_THROWS_AS(detect_cut_points(rotation_flow(), 8, 1e-9), no_cut_points_error);
  TorusParams still = make_torus_params({Rat(1) / 2, Rat(1) / 2}, {0, 0});
  CHECK_THROWS_AS(detect_cut_points(torus_flow(still), 8, 1e-9), no_cut_points_error);
  CHECK_THROWS_AS(detect_cut_points(glued61_flow(), 2, 1e-9), validation_error);
}

TEST_CASE("classify_intervals on the glued flow") {
  CutSet cuts = detect_cut_points(glued61_flow(), 8, 1e-9);
  PacMap m = glued_flow61(Rat(1) / 64);
  auto tags = classify_intervals(m, cuts);
  REQUIRE_FALSE(tags.empty());
  int type1 = 0, type2 = 0;
  Rat total = 0;
  for (const ClassifiedInterval& ci : tags) {
    total += ci.arc.length;
    if (ci.type == IntervalType::type1) {
      ++type1;
      CHECK(ci.arc.length <= cuts.delta_b / 4);
    } else {
      ++type2;
      CHECK(ci.arc.length >= cuts.delta_b / 2);
    }
  }
  CHECK(total == 1);       // the intervals tile the circle
  CHECK(type1 >= 1);       // the flow pinches slivers off the moving points
  CHECK(type2 >= 3);       // the bulk of each cut arc stays large
}

TEST_CASE("classify_intervals rejects breakpoints away from the cut set") {
  CutSet cuts{1, glued_cut_points(), Rat(1) / 8, 1};
  CHECK_THROWS_AS(classify_intervals(example41(1), cuts), validation_error);
  CHECK_THROWS_WITH_AS(classify_intervals(example41(1), cuts),
                       doctest::Contains("strays"), validation_error);
}

TEST_CASE("classify_intervals reports the dichotomy gap") {
  // Hand-built coarse cut set (as if detection under-resolved delta_b) plus a
  // three-jump map engineered so one continuity interval measures exactly
  // 3*delta_b/8, strictly inside the forbidden gap (delta_b/4, delta_b/2).
  CutSet cuts{1, {0, Rat(1) / 2}, Rat(4) / 5, 1};
  Domain s1 = Domain::circle(1);
  std::vector<Piece> ps = {
      {0, Rat(1) / 10, Rat(3) / 10, 0, Affine{1, Rat(1) / 10}},   // -> [1/5, 1/2)
      {0, Rat(2) / 5, Rat(1) / 5, 0, Affine{1, Rat(-2) / 5}},     // -> [0, 1/5)
      {0, Rat(3) / 5, Rat(1) / 2, 0, Affine{1, Rat(-1) / 10}},    // -> [1/2, 1)
  };
  PacMap m(s1, s1, ps);
  REQUIRE(m.sharp() == 3);  // all three boundaries jump
  CHECK_THROWS_AS(classify_intervals(m, cuts), parameter_too_large_error);
  CHECK_THROWS_WITH_AS(classify_intervals(m, cuts), doctest::Contains("3/10"),
                       parameter_too_large_error);
}

TEST_CASE("jump maps of the glued flow swap the outer arcs") {
  CutSet cuts = detect_cut_points(glued61_flow(), 8, 1e-9);
  JumpMaps jm = compute_jump_maps(glued61_flow(), cuts, Rat(1) / 64, 1e-9);
  CHECK(jm.sigma == std::vector<int>{2, 1, 0, 3});
  CHECK(jm.tau == std::vector<int>{2, 1, 0, 3});
  CHECK(jm.t_q == Rat(1) / 64);
  // one-sided exclusivity: an index moved by sigma1 is fixed by sigma2
  for (std::size_t i = 0; i < 4; ++i)
    if (jm.sigma1[i] != static_cast<int>(i)) CHECK(jm.sigma2[i] == static_cast<int>(i));
}

TEST_CASE("jump maps of a torus flow are the identity") {
  TorusParams p = make_torus_params({Rat(1) / 3, Rat(1) / 3, Rat(1) / 3},
                                    {Rat(1) / 3, 0, Rat(1) / 2});
  CutSet cuts = detect_cut_points(torus_flow(p), 8, 1e-9);
  JumpMaps jm = compute_jump_maps(torus_flow(p), cuts, Rat(1) / 64, 1e-9);
  CHECK(jm.sigma == std::vector<int>{0, 1, 2});
  CHECK(jm.tau == std::vector<int>{0, 1, 2});
}

TEST_CASE("orbit decomposition: identity maps give singletons") {
  JumpMaps jm;
  jm.sigma = jm.tau = jm.sigma1 = jm.tau1 = jm.sigma2 = jm.tau2 = {0, 1, 2, 3};
  OrbitDecomposition od = orbit_decomposition(jm);
  REQUIRE(od.orbits.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(od.orbits[static_cast<std::size_t>(i)] == std::vector<int>{i});
    CHECK(od.reps[static_cast<std::size_t>(i)] == i);
  }
  CHECK(od.L == std::vector<int>{0, 1, 2, 3});
  CHECK(od.S.empty());
}

TEST_CASE("orbit decomposition: a 3-cycle with inverse tau is a single S orbit") {
  JumpMaps jm;
  jm.sigma = {1, 2, 0};  // 0 -> 1 -> 2 -> 0
  jm.tau = {2, 0, 1};    // the inverse cycle
  jm.sigma1 = jm.sigma;
  jm.tau1 = jm.tau;
  jm.sigma2 = jm.tau2 = {0, 1, 2};
  OrbitDecomposition od = orbit_decomposition(jm);
  REQUIRE(od.orbits.size() == 1);
  CHECK(od.orbits[0] == std::vector<int>{0, 2, 1});  // tau-orbit order from 0
  CHECK(od.reps == std::vector<int>{0});
  CHECK(od.L.empty());
  CHECK(od.S == std::vector<int>{0, 1, 2});
}

TEST_CASE("orbit decomposition rejects inconsistent jump maps") {
  JumpMaps bad;
  bad.sigma = {1, 2, 0};
  bad.tau = {1, 2, 0};  // equal to sigma, not inverse to it
  CHECK_THROWS_AS(orbit_decomposition(bad), validation_error);
  CHECK_THROWS_WITH_AS(orbit_decomposition(bad), doctest::Contains("inconsistent"),
                       validation_error);

  JumpMaps chain;  // sigma-fixed index whose tau orbit never terminates
  chain.sigma = {0, 1};
  chain.tau = {1, 0};
  CHECK_THROWS_AS(orbit_decomposition(chain), validation_error);
}

TEST_CASE("build_domain_and_conjugator on the glued decomposition") {
  CutSet cuts{1, glued_cut_points(), Rat(1) / 8, 1};
  JumpMaps jm;
  jm.sigma = jm.tau = {2, 1, 0, 3};
  jm.sigma1 = jm.tau1 = jm.sigma;
  jm.sigma2 = jm.tau2 = {0, 1, 2, 3};
  OrbitDecomposition od = orbit_decomposition(jm);
  auto [dom, f] = build_domain_and_conjugator(cuts, od);
  REQUIRE(dom.components() == 3);
  CHECK(dom.lens == std::vector<Rat>{Rat(1) / 2, Rat(3) / 8, Rat(1) / 8});
  CHECK(dom.total() == 1);
  // the conjugator is a slope-1 bijection whose breakpoints sit inside B
  for (const Piece& p : f.pieces())
    CHECK(std::get<Affine>(p.tf).slope == 1);
  for (const DPoint& p : f.bp0())
    CHECK(dist_to_set(p.pos, cuts.points, 1) == 0);
  CHECK(compose(f, f.inverse()).equals(PacMap::identity(dom)));
  // it matches the inverse of the explicit gluing map
  CHECK(f.equals(glue61().inverse()));
}

TEST_CASE("four singleton orbits produce a componentwise re-coordinatization") {
  CutSet cuts{1, {0, Rat(1) / 4, Rat(1) / 2, Rat(3) / 4}, Rat(1) / 4, 1};
  JumpMaps jm;
  jm.sigma = jm.tau = jm.sigma1 = jm.tau1 = jm.sigma2 = jm.tau2 = {0, 1, 2, 3};
  auto [dom, f] = build_domain_and_conjugator(cuts, orbit_decomposition(jm));
  REQUIRE(dom.components() == 4);
  for (int c = 0; c < 4; ++c) {
    CHECK(dom.lens[static_cast<std::size_t>(c)] == Rat(1) / 4);
    // arc c maps onto component c starting at coordinate 0
    DPoint img = f.evaluate(DPoint{0, Rat(c) / 4});
    CHECK(img.comp == c);
    CHECK(img.pos == 0);
  }
}

TEST_CASE("straighten end-to-end: glued flow") {
  StraighteningResult r = straighten(glued61_flow());
  CHECK_FALSE(r.trivial);
  CHECK(r.cuts.points == glued_cut_points());
  CHECK(r.domain.lens == std::vector<Rat>{Rat(1) / 2, Rat(3) / 8, Rat(1) / 8});
  CHECK(r.orbits.orbits.size() == 3);
  CHECK(r.hom.passed);
  CHECK(r.verification.passed);
  for (const VerificationEntry& e : r.verification.entries) {
    CHECK(e.invariant);
    CHECK(e.max_residual <= 1e-9);
  }
  // the conjugate really is the chart flow upstairs
  PacMap g = compose(compose(r.conjugator, glued_flow61(Rat(1) / 8)),
                     r.conjugator.inverse());
  CHECK(g.equals(psi61(Rat(1) / 8), 1e-9));
}

TEST_CASE("straighten end-to-end: torus flow gives exact rotations") {
  TorusParams p = make_torus_params({Rat(1) / 3, Rat(1) / 3, Rat(1) / 3},
                                    {Rat(1) / 3, 0, Rat(1) / 2});
  StraighteningResult r = straighten(torus_flow(p));
  CHECK_FALSE(r.trivial);
  CHECK(r.cuts.points == std::vector<Rat>{0, Rat(1) / 3, Rat(2) / 3});
  REQUIRE(r.domain.components() == 3);
  for (const Rat& len : r.domain.lens) CHECK(len == Rat(1) / 3);
  CHECK(r.verification.passed);

  Rat t = Rat(1) / 8;
  PacMap conj = compose(compose(r.conjugator, torus_flow(p).at(t)),
                        r.conjugator.inverse());
  // componentwise: rotation by lambda_j * frac(t * alpha_j) on circle j
  std::vector<Piece> expect;
  for (int j = 0; j < 3; ++j) {
    Rat angle = Rat(1) / 3 * reduce_mod(t * p.alpha[static_cast<std::size_t>(j)], 1);
    expect.push_back(Piece{j, 0, Rat(1) / 3, j, Affine{1, angle}});
  }
  CHECK(conj.equals(PacMap(r.domain, r.domain, expect)));
}

TEST_CASE("straighten: continuous family takes the trivial path") {
  StraighteningResult r = straighten(rotation_flow());
  CHECK(r.trivial);
  CHECK(r.domain == Domain::circle(1));
  CHECK(r.conjugator.equals(PacMap::identity(Domain::circle(1))));
  CHECK(r.verification.passed);  // rotations conjugated by id stay continuous
}

TEST_CASE("straighten: dyadic generators have no cut set and fail verification") {
  // breakpoints of rho(1/2^n) accumulate at 0 instead of stabilizing, so no
  // cut points qualify; the trivial conjugator then cannot make the family
  // continuous, and the report must say so rather than pretend otherwise
  StraighteningResult r = straighten(dyadic63_flow());
  CHECK(r.trivial);
  CHECK_FALSE(r.verification.passed);
  bool some_residual = false;
  for (const VerificationEntry& e : r.verification.entries)
    some_residual = some_residual || e.residual_count > 0;
  CHECK(some_residual);
}

TEST_CASE("straighten rejects non-homomorphisms up front") {
  CHECK_THROWS_AS(straighten(example62_flow()), validation_error);
  CHECK_THROWS_WITH_AS(straighten(example62_flow()),
                       doctest::Contains("homomorphism"), validation_error);
}

TEST_CASE("verification flags a deliberately wrong conjugator") {
  StraighteningResult r = straighten(glued61_flow());
  REQUIRE(r.verification.passed);

  // Post-compose with a half-swap of the block [0,1/4) on the moving circle.
  // (A plain block exchange would be a rotation of that circle and rotations
  // conjugate continuous maps to continuous maps, so it would not be wrong.)
  std::vector<Piece> swap_ps = {
      {0, 0, Rat(1) / 8, 0, Affine{1, Rat(1) / 8}},
      {0, Rat(1) / 8, Rat(1) / 8, 0, Affine{1, Rat(-1) / 8}},
      {0, Rat(1) / 4, Rat(1) / 4, 0, Affine{1, 0}},
      {1, 0, Rat(3) / 8, 1, Affine{1, 0}},
      {2, 0, Rat(1) / 8, 2, Affine{1, 0}},
  };
  PacMap scramble(r.domain, r.domain, swap_ps);
  PacMap wrong = compose(scramble, r.conjugator);
  VerificationReport rep = verify_conjugate_continuity(
      r.domain, wrong, glued61_flow(), {Rat(1) / 8, Rat(-1) / 8}, 1e-9);
  CHECK_FALSE(rep.passed);
  bool flagged = false;
  for (const VerificationEntry& e : rep.entries)
    flagged = flagged || e.residual_count > 0 || !e.invariant;
  CHECK(flagged);
}

TEST_CASE("verification accepts the identity family with the identity conjugator") {
  Flow idfam;
  idfam.name = "identity";
  idfam.at = [](const Rat&) { return PacMap::identity(Domain::circle(1)); };
  idfam.declared_homomorphism = true;
  VerificationReport rep = verify_conjugate_continuity(
      Domain::circle(1), PacMap::identity(Domain::circle(1)), idfam,
      {Rat(1) / 8, Rat(1) / 2}, 1e-9);
  CHECK(rep.passed);
  for (const VerificationEntry& e : rep.entries) {
    CHECK(e.invariant);
    CHECK(e.max_residual == 0);
  }
}

}  // TEST_SUITE
