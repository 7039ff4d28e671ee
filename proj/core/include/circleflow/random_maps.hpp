// Seeded generators of random piecewise-affine circle bijections for property tests.
#pragma once

#include <random>
#include <vector>

#include "circleflow/circle.hpp"
#include "circleflow/pac_map.hpp"

namespace circleflow {

using Rng = std::mt19937_64;

// Rational in [0, 1) with denominator at most max_den.
Rat random_rational(Rng& rng, int max_den);

// k distinct points in [0, l), sorted ascending, denominators at most max_den
// (before scaling by l).
std::vector<Rat> random_partition(Rng& rng, int k, const Rat& l, int max_den);

// Piecewise-affine bijection of the circle of circumference l with 2..max_pieces
// pieces: source and target breakpoints drawn independently, source arc i sent to
// target arc (i + shift) mod k, slopes the induced length ratios.
PacMap random_aiet(Rng& rng, int max_pieces, const Rat& l = 1, int max_den = 64);

// Piecewise-isometric variant: target arc lengths equal source arc lengths, so
// every slope is 1.
PacMap random_iet(Rng& rng, int max_pieces, const Rat& l = 1, int max_den = 64);

// Arc with random start and random length in (0, l/2].
Arc random_arc(Rng& rng, const Rat& l, int max_den = 64);

}  // namespace circleflow
