// One-parameter families of circle maps: the block-rotation torus action, the
// worked example maps, the glued two-fixed-point flow, and a homomorphism checker.
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "circleflow/metric.hpp"
#include "circleflow/pac_map.hpp"

namespace circleflow {

// Block lengths and per-block rotation angles for the torus action on the unit
// circle. Angles are fractions of their block's length.
struct TorusParams {
  std::vector<Rat> lambda;  // positive, sums to 1
  std::vector<Rat> alpha;   // reduced into [0, 1)
};

TorusParams make_torus_params(std::vector<Rat> lambda, std::vector<Rat> alpha);

// Time-t map: block j = [beta_{j-1}, beta_j) rotated internally by
// lambda_j * frac(t * alpha_j). Exact and additive in t.
PacMap standard_torus_action(const TorusParams& p, const Rat& t);

// Piecewise-affine map that compresses [1/4,1/2) by half into n interleaved slots
// and rebalances through [1/2,1): close to the identity in the plain L1 distance
// while its inverse stays far from it. n >= 1.
PacMap example31(int n);

// Involution swapping the two halves of each of the 2^n dyadic blocks. n >= 1.
PacMap example41(int n);

// Identity on [0, 1/2^n), half-swap on each block [1/2^k, 1/2^{k-1}), k = 1..n:
// a Cauchy sequence in the metric whose discontinuity count diverges. n >= 1.
PacMap cauchy46(int n);

// floor(|t|) blocks of equal length, each rotated internally by frac(t); the
// identity for integer t, yet with unboundedly many discontinuities in t.
PacMap example62(const Rat& t);

// Generator rho(1/2^n): rotation by 1/2^{n+1} on each block [1/2^m, 1/2^{m-1}),
// m = 1..n, identity on [0, 1/2^n). n >= 0; n = 0 gives the identity.
PacMap dyadic63_generator(int n);

// rho(1/2^n)^m via square-and-multiply; m may be negative (inverse powers).
PacMap dyadic63(long m, int n);

// The glued domain: circles of circumference 1/2, 3/8, 1/8.
Domain glued61_domain();

// The gluing map h from the glued domain onto the unit circle.
PacMap glue61();

// Flow upstairs: two-fixed-point chart flow on the first circle (fixed points
// 1/8 and 3/8, motion toward 1/8 for t > 0), identity on the other two circles.
PacMap psi61(const Rat& t);

// Downstairs family rho(t) = h . psi61(t) . h^-1 on the unit circle.
PacMap glued_flow61(const Rat& t);

// A one-parameter family given by an evaluation contract. `at` must satisfy
// at(0) = identity; declared_homomorphism records whether at(s+t) = at(s).at(t)
// is expected to hold.
struct Flow {
  std::string name;
  Domain domain = Domain::circle(1);
  bool declared_homomorphism = true;
  Rat t0 = Rat(1) / 4;  // dyadic sampling seed for detection
  std::function<PacMap(const Rat&)> at;
};

Flow torus_flow(const TorusParams& p);
Flow glued61_flow();
Flow dyadic63_flow();    // defined for dyadic t = p/2^k only
Flow example62_flow();   // declared_homomorphism = false

struct HomReport {
  bool passed = true;
  bool identity_ok = true;   // at(0) is the identity within tol
  double max_defect = 0;     // max over pairs of d(at(s+t), at(s).at(t))
  Rat worst_s = 0, worst_t = 0;
  std::vector<std::pair<Rat, double>> continuity;  // (t_k, d(at(t_k), id)), t_k -> 0
  std::string message;
};

// Checks the homomorphism law on all pairs from ts (including the diagonal) and
// samples d(at(t_k), id) along t_k = t0/2^k as a continuity witness.
HomReport homomorphism_check(const Flow& fam, const std::vector<Rat>& ts, double tol);

}  // namespace circleflow
