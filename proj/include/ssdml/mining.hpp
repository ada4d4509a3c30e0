#pragma once

// Triplet mining from propagated affinities: each anchor's k neighbors are
// sorted by descending affinity, the first half become positives, the second
// half negatives, and the j-th positive is paired with the j-th negative.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/graph.hpp"
#include "ssdml/random.hpp"

namespace ssdml {

struct Triplet {
  Index a = 0;  // anchor
  Index p = 0;  // positive
  Index n = 0;  // negative

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletBatch {
  std::vector<Triplet> triplets;

  Index size() const { return static_cast<Index>(triplets.size()); }
};

// Mode-seeking anchor selection is not provided.
enum class AnchorSelection { all_nodes };

inline std::vector<Index> select_anchors(const AffinityGraph& g,
                                         AnchorSelection mode = AnchorSelection::all_nodes) {
  switch (mode) {
    case AnchorSelection::all_nodes:
      break;
  }
  std::vector<Index> out(static_cast<std::size_t>(g.size()));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

/// Neighbors of `a` by descending W(a, .), ties by ascending index.
inline std::vector<Index> sorted_neighborhood(const Matrix& w, const KnnGraph& knn, Index a) {
  require(a >= 0 && a < knn.size(), "sorted_neighborhood: anchor out of range");
  std::vector<Index> nb = knn.neighbors[static_cast<std::size_t>(a)];
  std::sort(nb.begin(), nb.end(), [&](Index x, Index y) {
    const double wx = w(a, x), wy = w(a, y);
    return wx > wy || (wx == wy && x < y);
  });
  return nb;
}

/// floor(k/2) triplets per anchor, in anchor order. When `min_gap` > 0,
/// triplets with W(a,p) - W(a,n) < min_gap are dropped.
inline std::vector<Triplet> mine_triplets(const Matrix& w, const KnnGraph& knn,
                                          std::span<const Index> anchors, double min_gap = 0.0) {
  require(knn.k >= 2, "mine_triplets: k must be >= 2");
  const auto half = static_cast<std::size_t>(knn.k / 2);
  std::vector<Triplet> out;
  out.reserve(anchors.size() * half);
  for (const Index a : anchors) {
    const auto nb = sorted_neighborhood(w, knn, a);
    for (std::size_t j = 0; j < half; ++j) {
      const Triplet t{a, nb[j], nb[half + j]};
      if (min_gap > 0.0 && w(a, t.p) - w(a, t.n) < min_gap) continue;
      out.push_back(t);
    }
  }
  return out;
}

inline std::vector<Triplet> mine_triplets(const AffinityGraph& g, double min_gap = 0.0) {
  const auto anchors = select_anchors(g);
  return mine_triplets(g.W, g.knn, anchors, min_gap);
}

/// Shuffles and cuts floor(|triplets| / t_b) full batches; the remainder is dropped.
inline std::vector<TripletBatch> batch_triplets(std::vector<Triplet> triplets, Index t_b,
                                                std::uint64_t seed) {
  require(t_b >= 1, "batch_triplets: t_b must be >= 1");
  Rng rng(derive_seed(seed, 0xBA7C));
  rng.shuffle(std::span(triplets));
  const auto per = static_cast<std::size_t>(t_b);
  const std::size_t n_batches = triplets.size() / per;
  std::vector<TripletBatch> out(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b)
    out[b].triplets.assign(triplets.begin() + static_cast<std::ptrdiff_t>(b * per),
                           triplets.begin() + static_cast<std::ptrdiff_t>((b + 1) * per));
  return out;
}

}  // namespace ssdml
