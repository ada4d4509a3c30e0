#pragma once

// Angular soft-plus metric loss over a batch of triplets in matrix form.
//
// For triplet i with anchor z, positive z+ and negative z-:
//   a_i = (z + z+)/2,  p_i = z - z+,  q_i = z- - a_i
//   m_i = ||L^T p_i||^2 - 4 tan^2(alpha) ||L^T q_i||^2
//   J   = sum_i log(1 + exp(m_i))
// The negative-offset matrix (columns q_i) is called Nmat here; the graph
// module already uses Q for the neighborhood matrix.

#include <cmath>
#include <numbers>
#include <string>

#include "ssdml/common.hpp"
#include "ssdml/mining.hpp"

namespace ssdml {

struct LossConfig {
  double alpha_deg = 40.0;
  double tan2a = 0.0;  // tan^2(alpha)

  static LossConfig from_degrees(double alpha_deg) {
    require(alpha_deg > 0.0 && alpha_deg < 90.0, "loss: alpha must lie in (0, 90) degrees");
    const double t = std::tan(alpha_deg * std::numbers::pi / 180.0);
    return LossConfig{alpha_deg, t * t};
  }
};

struct BatchMatrices {
  Matrix Amat;  // d x T_b, anchor-positive means
  Matrix Pmat;  // d x T_b, anchor - positive
  Matrix Nmat;  // d x T_b, negative - mean
  Vector m;     // margins
  Vector f;     // per-triplet losses
  Vector g;     // sigmoid(m)

  Index size() const { return Pmat.cols(); }
  Index dim() const { return Pmat.rows(); }
};

/// `points` holds one d-dim embedding per column; triplet indices address columns.
inline BatchMatrices build_batch(const Matrix& points, const TripletBatch& batch) {
  const Index d = points.rows();
  const Index tb = batch.size();
  BatchMatrices bm;
  bm.Amat.resize(d, tb);
  bm.Pmat.resize(d, tb);
  bm.Nmat.resize(d, tb);
  for (Index i = 0; i < tb; ++i) {
    const auto& t = batch.triplets[static_cast<std::size_t>(i)];
    require(t.a >= 0 && t.a < points.cols() && t.p >= 0 && t.p < points.cols() && t.n >= 0 &&
                t.n < points.cols(),
            "build_batch: triplet index out of range");
    bm.Amat.col(i) = 0.5 * (points.col(t.a) + points.col(t.p));
    bm.Pmat.col(i) = points.col(t.a) - points.col(t.p);
    bm.Nmat.col(i) = points.col(t.n) - bm.Amat.col(i);
  }
  return bm;
}

/// log(1 + exp(m)) without overflow.
inline double softplus(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

inline double sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

/// Fills bm.m, bm.f, bm.g and returns J.
inline double loss(const Matrix& L, const LossConfig& cfg, BatchMatrices& bm) {
  require(L.rows() == bm.dim(), "loss: L has " + std::to_string(L.rows()) +
                                    " rows, embeddings have dimension " + std::to_string(bm.dim()));
  const Matrix lp = L.transpose() * bm.Pmat;
  const Matrix lq = L.transpose() * bm.Nmat;
  bm.m = lp.cwiseProduct(lp).colwise().sum().transpose() -
         4.0 * cfg.tan2a * lq.cwiseProduct(lq).colwise().sum().transpose();
  bm.f.resize(bm.size());
  bm.g.resize(bm.size());
  double j = 0.0;
  for (Index i = 0; i < bm.size(); ++i) {
    if (!std::isfinite(bm.m(i)))
      throw NumericalError("loss: non-finite margin at batch index " + std::to_string(i));
    bm.f(i) = softplus(bm.m(i));
    bm.g(i) = sigmoid(bm.m(i));
    j += bm.f(i);
  }
  return j;
}

/// (P~ P^T - 4 tan^2(alpha) N~ N^T) L with P~ = P diag(2g), N~ = N diag(2g).
inline Matrix grad_L(const Matrix& L, const LossConfig& cfg, const BatchMatrices& bm) {
  require(bm.g.size() == bm.size(), "grad_L: call loss() first");
  const Vector two_g = 2.0 * bm.g;
  const Matrix ptil = bm.Pmat * two_g.asDiagonal();
  const Matrix ntil = bm.Nmat * two_g.asDiagonal();
  return (ptil * bm.Pmat.transpose() - 4.0 * cfg.tan2a * ntil * bm.Nmat.transpose()) * L;
}

/// dJ/dz for every column of the `points` matrix the batch was built from
/// (zero for columns no triplet touches).
inline Matrix grad_points(const Matrix& L, const LossConfig& cfg, const BatchMatrices& bm,
                          const TripletBatch& batch, Index n_points) {
  require(bm.g.size() == bm.size(), "grad_points: call loss() first");
  const Matrix llt = L * L.transpose();
  // dJ/dp_i and dJ/dq_i, column-wise
  const Matrix dp = llt * bm.Pmat * (2.0 * bm.g).asDiagonal();
  const Matrix dq = llt * bm.Nmat * (-8.0 * cfg.tan2a * bm.g).asDiagonal();
  Matrix grad = Matrix::Zero(bm.dim(), n_points);
  for (Index i = 0; i < bm.size(); ++i) {
    const auto& t = batch.triplets[static_cast<std::size_t>(i)];
    grad.col(t.a) += dp.col(i) - 0.5 * dq.col(i);
    grad.col(t.p) += -dp.col(i) - 0.5 * dq.col(i);
    grad.col(t.n) += dq.col(i);
  }
  return grad;
}

}  // namespace ssdml
