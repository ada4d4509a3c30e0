#pragma once

// Clustering and retrieval quality of an embedding: seeded k-means++ with
// NMI against ground truth, and Recall@K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/random.hpp"

namespace ssdml {

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centers;  // k x d
  double inertia = 0.0;
  int iterations = 0;
};

namespace detail {

inline KMeansResult kmeans_single(const Matrix& x, int k, Rng& rng, int max_iter) {
  const Index n = x.rows();
  KMeansResult res;
  res.centers.resize(k, x.cols());

  // k-means++ seeding
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Index first = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  res.centers.row(0) = x.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& di = d2[static_cast<std::size_t>(i)];
      di = std::min(di, (x.row(i) - res.centers.row(c - 1)).squaredNorm());
      total += di;
    }
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > target && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    res.centers.row(c) = x.row(pick);
  }

  res.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i) - res.centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dc = (x.row(i) - res.centers.row(c)).squaredNorm();
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      dist[static_cast<std::size_t>(i)] = best_d;
      if (res.assignment[static_cast<std::size_t>(i)] != best) {
        res.assignment[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    res.iterations = it + 1;
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = res.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        res.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // empty cluster: take over the point farthest from its center
      const auto far = std::max_element(dist.begin(), dist.end()) - dist.begin();
      res.centers.row(c) = x.row(far);
      dist[static_cast<std::size_t>(far)] = 0.0;
    }
  }

  res.inertia = 0.0;
  for (Index i = 0; i < n; ++i)
    res.inertia += (x.row(i) - res.centers.row(res.assignment[static_cast<std::size_t>(i)])).squaredNorm();
  return res;
}

}  // namespace detail

/// Lowest-inertia result over `n_init` k-means++ runs on the rows of `points`.
inline KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter = 300,
                           int n_init = 10) {
  require(k >= 1, "kmeans: k must be >= 1");
  require(k <= points.rows(), "kmeans: k exceeds the number of points");
  require(max_iter >= 1 && n_init >= 1, "kmeans: max_iter and n_init must be >= 1");
  Rng rng(derive_seed(seed, 0x6B3A));
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < n_init; ++r) {
    auto res = detail::kmeans_single(points, k, rng, max_iter);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

/// 100 * I(A;Y) / ((H(A) + H(Y)) / 2), natural logs; 0 when both entropies vanish.
inline double nmi(std::span<const int> assign, std::span<const int> labels) {
  require(assign.size() == labels.size(), "nmi: assignment and label lengths differ");
  require(!assign.empty(), "nmi: empty input");
  const auto n = static_cast<double>(assign.size());
  std::map<int, double> ca, cy;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    ca[assign[i]] += 1.0;
    cy[labels[i]] += 1.0;
    joint[{assign[i], labels[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [_, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(ca), hy = entropy(cy);
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pij = c / n;
    mi += pij * std::log(pij / ((ca[key.first] / n) * (cy[key.second] / n)));
  }
  const double denom = 0.5 * (ha + hy);
  if (denom <= 0.0) return 0.0;
  return std::clamp(100.0 * mi / denom, 0.0, 100.0);
}

/// Percentage of rows whose K nearest other rows (Euclidean, ties by index)
/// include at least one of the same class.
inline std::map<int, double> recall_at_k(const Matrix& embeddings, std::span<const int> labels,
                                         std::span<const int> ks) {
  const Index n = embeddings.rows();
  require(static_cast<Index>(labels.size()) == n, "recall_at_k: one label per row required");
  require(!ks.empty(), "recall_at_k: no K values given");
  const int kmax = *std::max_element(ks.begin(), ks.end());
  require(*std::min_element(ks.begin(), ks.end()) >= 1, "recall_at_k: K must be >= 1");
  require(n >= kmax + 1, "recall_at_k: need at least max(K) + 1 points");

  // first_hit[i] = rank (1-based) of the nearest same-class neighbor within kmax, else 0
  std::vector<int> first_hit(static_cast<std::size_t>(n), 0);
  std::vector<double> d2(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d2[static_cast<std::size_t>(j)] = (embeddings.row(i) - embeddings.row(j)).squaredNorm();
    std::size_t w = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) order[w++] = j;
    std::partial_sort(order.begin(), order.begin() + kmax, order.end(), [&](Index a, Index b) {
      const double da = d2[static_cast<std::size_t>(a)], db = d2[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    });
    for (int r = 0; r < kmax; ++r) {
      if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] == labels[static_cast<std::size_t>(i)]) {
        first_hit[static_cast<std::size_t>(i)] = r + 1;
        break;
      }
    }
  }
  std::map<int, double> out;
  for (const int k : ks) {
    const auto hits = std::count_if(first_hit.begin(), first_hit.end(), [k](int r) { return r > 0 && r <= k; });
    out[k] = 100.0 * static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

struct EvalReport {
  double nmi = 0.0;              // percent
  std::map<int, double> recall;  // K -> percent
  Index n_test = 0;
  std::uint64_t seed = 0;
};

/// k-means with one cluster per distinct label, then NMI and Recall@K.
inline EvalReport evaluate(const Matrix& embeddings, std::span<const int> labels,
                           std::span<const int> ks, std::uint64_t seed) {
  const std::set<int> classes(labels.begin(), labels.end());
  EvalReport rep;
  rep.n_test = embeddings.rows();
  rep.seed = seed;
  const auto km = kmeans(embeddings, static_cast<int>(classes.size()), seed);
  rep.nmi = nmi(km.assignment, labels);
  rep.recall = recall_at_k(embeddings, labels, ks);
  return rep;
}

}  // namespace ssdml
