// Flow straightening: detect where a one-parameter family cuts the circle, read
// off how arcs jump across the cuts, decompose the jump orbits, and build the
// domain and conjugator that make the family continuous component by component.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "circleflow/errors.hpp"
#include "circleflow/flows.hpp"
#include "circleflow/pac_map.hpp"

namespace circleflow {

// Thrown when no breakpoint survives the stability window: the family looks
// continuous and straightening degenerates to the identity.
struct no_cut_points_error : validation_error {
  using validation_error::validation_error;
};

// Thrown when the sampled parameter is not small enough for the dichotomies the
// pipeline relies on (interval classification, jump-map consistency).
struct parameter_too_large_error : validation_error {
  using validation_error::validation_error;
};

// Stable discontinuity positions b_0 < ... < b_{N-1} on the circle of
// circumference l; arc i is [b_i, b_{i+1}) (cyclically).
struct CutSet {
  Rat l = 1;
  std::vector<Rat> points;
  Rat delta_b = 1;     // min pairwise circle distance; l when N == 1
  int window_from = 1; // smallest q of the verified stability window
};

int cut_arc_index(const CutSet& cuts, const Rat& x);  // arc containing x
Arc cut_arc(const CutSet& cuts, int i);               // [b_i, b_{i+1})

// Samples the family at t0/2^q for q = 1..q_max (both signs), keeps only
// parameters where the discontinuity count is locally maximal, and returns the
// breakpoints that persist across a stability window of at least 3 consecutive
// samples within tol (exactly repeated rational positions when available).
CutSet detect_cut_points(const Flow& fam, int q_max, double tol);

enum class IntervalType { type1, type2 };

struct ClassifiedInterval {
  Arc arc;
  IntervalType type;
};

// Tags every maximal continuity interval of m: type1 if its measure is at most
// delta_b/4, type2 if at least delta_b/2. A measure strictly between throws
// parameter_too_large_error; a breakpoint farther than delta_b/8 from the cut
// set throws validation_error.
std::vector<ClassifiedInterval> classify_intervals(const PacMap& m, const CutSet& cuts,
                                                   double eps = -1);

// Where arcs jump across cut points at parameter t_q: sigma1(i) is the arc
// receiving the value at b_i under fam(t_q) and tau1(i) the arc receiving the
// left limit at b_{i+1} (snapped to the arc it closes when the limit lands on a
// cut point); sigma2/tau2 likewise under fam(-t_q); sigma/tau combine them,
// preferring whichever sign moves the index.
struct JumpMaps {
  std::vector<int> sigma1, tau1, sigma2, tau2, sigma, tau;
  Rat t_q;
};

// Computes the jump maps at t_q and at t_q/2 and requires them to agree
// (parameter_too_large_error otherwise); validates the one-sided exclusivity
// sigma1(i) != i => sigma2(i) = i and the inverse laws between sigma and tau
// (validation_error "cut set invalid" otherwise).
JumpMaps compute_jump_maps(const Flow& fam, const CutSet& cuts, const Rat& t_q,
                           double tol);

// Orbits of the indices under sigma and tau, each listed in tau-orbit order from
// its representative; L holds the sigma-fixed indices, S the indices in orbits
// that avoid L.
struct OrbitDecomposition {
  std::vector<std::vector<int>> orbits;
  std::vector<int> reps;
  std::vector<int> L;
  std::vector<int> S;
};

OrbitDecomposition orbit_decomposition(const JumpMaps& jm);

// One circle per orbit, of circumference the summed measures of its arcs; the
// conjugator sends arc B_{tau^h(m_j)} isometrically onto the h-th block of
// circle j.
std::pair<Domain, PacMap> build_domain_and_conjugator(const CutSet& cuts,
                                                      const OrbitDecomposition& od);

struct VerificationEntry {
  Rat t;
  bool invariant = false;   // conjugate maps every component into itself
  double max_residual = 0;  // largest boundary jump of the conjugate
  int residual_count = 0;   // boundary jumps above tolerance
};

struct VerificationReport {
  bool passed = false;
  double tol = 0;
  std::vector<VerificationEntry> entries;
  std::string message;
};

struct StraightenConfig {
  int q_max = 12;
  double tol = 1e-9;
  std::vector<Rat> hom_ts;      // defaults to dyadic times including 3/4
  std::vector<Rat> verify_ts;   // defaults to {±1/32, ±1/8, ±1/2}
  int grid = 1000;              // invariance samples per component
};

struct StraighteningResult {
  bool trivial = false;  // no cut points: identity conjugator
  CutSet cuts;
  JumpMaps jump_maps;
  OrbitDecomposition orbits;
  Domain domain;
  PacMap conjugator;
  HomReport hom;
  VerificationReport verification;
};

// Full pipeline. Throws validation_error when the family fails the
// homomorphism precondition; a failed final verification is NOT an exception
// but is reported (and the CLI turns it into a verification exit code).
StraighteningResult straighten(const Flow& fam, const StraightenConfig& cfg = {});

// Standalone re-run of the verification stage on an existing conjugator.
VerificationReport verify_conjugate_continuity(const Domain& domain,
                                               const PacMap& conjugator,
                                               const Flow& fam,
                                               const std::vector<Rat>& ts,
                                               double tol = 1e-9, int grid = 1000);

}  // namespace circleflow
