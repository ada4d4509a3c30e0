#pragma once

// kNN graph over a partition, initial affinities W0, neighborhood matrix Q,
// closed-form affinity propagation W* = (1 - gamma) (I - gamma Q)^-1 W0,
// and symmetrization.

#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/dataset.hpp"

namespace ssdml {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct KnnGraph {
  int k = 0;
  std::vector<std::vector<Index>> neighbors;  // per node, nearest first
  std::vector<std::vector<double>> sq_dists;  // matching squared distances
  SparseMatrix Q;                             // Q(i, j) = 1/k for j in N_k(i)

  Index size() const { return static_cast<Index>(neighbors.size()); }
};

/// Exact Euclidean kNN over the rows of `points` (n x d), self excluded.
/// Equal distances are ordered by smaller index.
inline KnnGraph build_knn(const Matrix& points, int k) {
  const Index n = points.rows();
  require(k >= 2, "build_knn: k must be >= 2");
  require(n > k, "build_knn: need more than k points (n=" + std::to_string(n) +
                     ", k=" + std::to_string(k) + ")");

  KnnGraph g;
  g.k = k;
  g.neighbors.resize(static_cast<std::size_t>(n));
  g.sq_dists.resize(static_cast<std::size_t>(n));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n * k));
  std::vector<double> d2(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d2[static_cast<std::size_t>(j)] = (points.row(i) - points.row(j)).squaredNorm();
    std::size_t w = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) order[w++] = j;
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      const double da = d2[static_cast<std::size_t>(a)], db = d2[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    });
    auto& nb = g.neighbors[static_cast<std::size_t>(i)];
    auto& nd = g.sq_dists[static_cast<std::size_t>(i)];
    nb.assign(order.begin(), order.begin() + k);
    for (Index j : nb) {
      nd.push_back(d2[static_cast<std::size_t>(j)]);
      entries.emplace_back(i, j, 1.0 / k);
    }
  }
  g.Q.resize(n, n);
  g.Q.setFromTriplets(entries.begin(), entries.end());
  return g;
}

/// +1 on the diagonal and for same-label pairs, -1 for different-label
/// pairs, 0 whenever either endpoint is unlabeled.
inline Matrix initial_affinity(std::span<const Label> labels) {
  const auto n = static_cast<Index>(labels.size());
  require(n >= 2, "initial_affinity: need at least 2 nodes");
  Matrix w0 = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    w0(i, i) = 1.0;
    const auto& yi = labels[static_cast<std::size_t>(i)];
    if (!yi) continue;
    for (Index j = 0; j < n; ++j) {
      const auto& yj = labels[static_cast<std::size_t>(j)];
      if (j != i && yj) w0(i, j) = (*yi == *yj) ? 1.0 : -1.0;
    }
  }
  return w0;
}

/// Solves (I - gamma Q) X = (1 - gamma) W0 by dense LU with partial pivoting.
inline Matrix propagate(const Matrix& w0, const Matrix& q, double gamma) {
  require(gamma > 0.0 && gamma < 1.0, "propagate: gamma must lie in (0, 1)");
  require(w0.rows() == w0.cols() && q.rows() == q.cols() && q.rows() == w0.rows(),
          "propagate: W0 and Q must be square and of equal size");
  const Index n = q.rows();
  const Matrix system = Matrix::Identity(n, n) - gamma * q;
  const Eigen::PartialPivLU<Matrix> lu(system);
  Matrix wstar = lu.solve((1.0 - gamma) * w0);
  if (!wstar.allFinite()) throw NumericalError("propagate: non-finite solution");
  return wstar;
}

inline Matrix propagate(const Matrix& w0, const SparseMatrix& q, double gamma) {
  return propagate(w0, Matrix(q), gamma);
}

/// W = (W* + W*^T) / 2, bit-symmetric.
inline Matrix symmetrize(const Matrix& wstar) {
  require(wstar.rows() == wstar.cols(), "symmetrize: matrix must be square");
  const Index n = wstar.rows();
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i) {
    w(i, i) = wstar(i, i);
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 0.5 * (wstar(i, j) + wstar(j, i));
  }
  return w;
}

struct AffinityGraph {
  KnnGraph knn;
  Matrix W0;
  Matrix Wstar;
  Matrix W;
  double gamma = 0.99;

  Index size() const { return W.rows(); }
  int k() const { return knn.k; }
};

/// Whole pipeline on the rows of `embeddings`; rows are l2-normalized first.
inline AffinityGraph build_affinity_graph(const Matrix& embeddings, std::span<const Label> labels,
                                          int k, double gamma) {
  require(embeddings.rows() == static_cast<Index>(labels.size()),
          "build_affinity_graph: one label slot per node required");
  Matrix unit = embeddings;
  for (Index i = 0; i < unit.rows(); ++i) {
    const double nrm = unit.row(i).norm();
    if (nrm > 0.0) unit.row(i) /= nrm;
  }
  AffinityGraph g;
  g.gamma = gamma;
  g.knn = build_knn(unit, k);
  g.W0 = initial_affinity(labels);
  g.Wstar = propagate(g.W0, g.knn.Q, gamma);
  g.W = symmetrize(g.Wstar);
  return g;
}

}  // namespace ssdml
