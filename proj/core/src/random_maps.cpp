#include "circleflow/random_maps.hpp"

#include <set>

#include "circleflow/errors.hpp"

namespace circleflow {

Rat random_rational(Rng& rng, int max_den) {
  if (max_den < 1) throw validation_error("random_rational needs max_den >= 1");
  std::uniform_int_distribution<int> den_dist(1, max_den);
  int den = den_dist(rng);
  std::uniform_int_distribution<int> num_dist(0, den - 1);
  return make_rat(num_dist(rng), den);
}

std::vector<Rat> random_partition(Rng& rng, int k, const Rat& l, int max_den) {
  if (k < 1) throw validation_error("random_partition needs k >= 1");
  std::set<Rat> pts;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < k) {
    pts.insert(random_rational(rng, max_den) * l);
    if (++attempts > 1000 * k)
      throw validation_error("random_partition: not enough distinct rationals available");
  }
  return std::vector<Rat>(pts.begin(), pts.end());
}

static std::vector<Rat> cyclic_lengths(const std::vector<Rat>& pts, const Rat& l) {
  std::vector<Rat> lens(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Rat& next = pts[(i + 1) % pts.size()];
    lens[i] = (i + 1 == pts.size() ? next + l : next) - pts[i];
  }
  return lens;
}

PacMap random_aiet(Rng& rng, int max_pieces, const Rat& l, int max_den) {
  if (max_pieces < 2) throw validation_error("random_aiet needs max_pieces >= 2");
  std::uniform_int_distribution<int> k_dist(2, max_pieces);
  int k = k_dist(rng);
  std::vector<Rat> src = random_partition(rng, k, l, max_den);
  std::vector<Rat> dst = random_partition(rng, k, l, max_den);
  std::vector<Rat> src_len = cyclic_lengths(src, l);
  std::vector<Rat> dst_len = cyclic_lengths(dst, l);
  std::uniform_int_distribution<int> shift_dist(0, k - 1);
  int shift = shift_dist(rng);

  std::vector<Piece> pieces;
  pieces.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    int j = (i + shift) % k;
    Rat slope = dst_len[static_cast<std::size_t>(j)] / src_len[static_cast<std::size_t>(i)];
    Rat offset = dst[static_cast<std::size_t>(j)] - slope * src[static_cast<std::size_t>(i)];
    pieces.push_back(Piece{0, src[static_cast<std::size_t>(i)],
                           src_len[static_cast<std::size_t>(i)], 0,
                           Affine{slope, offset}});
  }
  Domain d = Domain::circle(l);
  return PacMap(d, d, std::move(pieces));
}

PacMap random_iet(Rng& rng, int max_pieces, const Rat& l, int max_den) {
  if (max_pieces < 2) throw validation_error("random_iet needs max_pieces >= 2");
  std::uniform_int_distribution<int> k_dist(2, max_pieces);
  int k = k_dist(rng);
  std::vector<Rat> src = random_partition(rng, k, l, max_den);
  std::vector<Rat> src_len = cyclic_lengths(src, l);
  std::uniform_int_distribution<int> shift_dist(0, k - 1);
  int shift = shift_dist(rng);
  Rat phase = random_rational(rng, max_den) * l;

  // Target slot m holds source arc (m - shift) mod k; slots start at phase.
  std::vector<Rat> slot_start(static_cast<std::size_t>(k));
  Rat cur = phase;
  for (int m = 0; m < k; ++m) {
    slot_start[static_cast<std::size_t>(m)] = cur;
    cur += src_len[static_cast<std::size_t>((m - shift + k) % k)];
  }

  std::vector<Piece> pieces;
  pieces.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    int m = (i + shift) % k;
    Rat offset = slot_start[static_cast<std::size_t>(m)] - src[static_cast<std::size_t>(i)];
    pieces.push_back(Piece{0, src[static_cast<std::size_t>(i)],
                           src_len[static_cast<std::size_t>(i)], 0, Affine{1, offset}});
  }
  Domain d = Domain::circle(l);
  return PacMap(d, d, std::move(pieces));
}

Arc random_arc(Rng& rng, const Rat& l, int max_den) {
  Rat start = random_rational(rng, max_den) * l;
  Rat len = 0;
  while (len == 0) len = random_rational(rng, max_den) * l / 2;
  return make_arc(start, len, l);
}

}  // namespace circleflow
