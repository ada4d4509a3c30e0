#pragma once

// Grassmann geometry for the metric factor L (d x l, L^T L = I) and a
// line-searched Riemannian descent loop over it.
//
// Points are represented by orthonormal d x l matrices; the quotient by
// O(l) is handled implicitly by working in the horizontal space
// {xi : L^T xi = 0}, whose projector is xi = G - L (L^T G).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/random.hpp"

namespace ssdml {

inline constexpr double kOrthonormalTol = 1e-8;

/// Riemannian gradient: removes the component of G in span(L).
inline Matrix project_tangent(const Matrix& L, const Matrix& G) {
  require(L.rows() == G.rows() && L.cols() == G.cols(), "project_tangent: shape mismatch");
  const double err = orthonormality_error(L);
  require(err <= kOrthonormalTol,
          "project_tangent: L is not orthonormal (||L^T L - I||_F = " + std::to_string(err) + ")");
  return G - L * (L.transpose() * G);
}

/// Thin-QR retraction of L + t xi; columns are sign-fixed so that R has a
/// positive diagonal. A zero step returns L unchanged.
inline Matrix retract(const Matrix& L, const Matrix& xi, double t) {
  require(L.rows() == xi.rows() && L.cols() == xi.cols(), "retract: shape mismatch");
  if (t == 0.0 || xi.isZero(0.0)) return L;

  const Matrix y = L + t * xi;
  const Index d = y.rows(), l = y.cols();
  const Eigen::HouseholderQR<Matrix> qr(y);
  Matrix q = qr.householderQ() * Matrix::Identity(d, l);
  const auto& r = qr.matrixQR();
  const double scale = std::max(1.0, y.norm());
  for (Index j = 0; j < l; ++j) {
    const double rjj = r(j, j);
    if (!std::isfinite(rjj) || std::abs(rjj) <= 1e-12 * scale)
      throw NumericalError("retract: L + t*xi is rank deficient (column " + std::to_string(j) + ")");
    if (rjj < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Uniformly distributed orthonormal d x l matrix.
inline Matrix random_orthonormal(Index d, Index l, Rng& rng) {
  require(l >= 1 && l <= d, "random_orthonormal: need 1 <= l <= d");
  Matrix g(d, l);
  for (Index j = 0; j < l; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, l);
  for (Index j = 0; j < l; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

inline Matrix random_orthonormal(Index d, Index l, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthonormal(d, l, rng);
}

// ---------------------------------------------------------------------------
// Optimization

enum class RiemannMethod { gd, cg };

struct ArmijoParams {
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
};

struct RiemannianOptConfig {
  int max_iter = 10;
  RiemannMethod method = RiemannMethod::gd;
  ArmijoParams line_search;
  double grad_tol = 1e-8;
};

/// Value and Euclidean (ambient) gradient of a cost at L.
struct CostEval {
  double value = 0.0;
  Matrix grad;
};

enum class OptStatus { converged, max_iter, line_search_failed };

inline const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::converged: return "converged";
    case OptStatus::max_iter: return "max_iter";
    case OptStatus::line_search_failed: return "line_search_failed";
  }
  return "?";
}

struct OptResult {
  Matrix L;
  double cost = 0.0;
  double grad_norm = 0.0;  // Riemannian gradient norm at L
  int iterations = 0;      // accepted steps
  OptStatus status = OptStatus::max_iter;
  std::vector<double> cost_history;  // cost at L0 and after each accepted step
};

/// Descent on Gr(d, l) from L0. Every accepted step satisfies the Armijo
/// condition, so the cost sequence is non-increasing. A failed line search
/// ends the run with status line_search_failed and the last accepted iterate.
///
/// CG uses Fletcher-Reeves with re-projection onto the new tangent space as
/// vector transport, restarting every l(d-l) iterations or whenever the
/// transported direction is not a descent direction.
template <class Cost>
OptResult optimize_L(const Matrix& L0, Cost&& cost, const RiemannianOptConfig& cfg) {
  require(cfg.max_iter >= 1, "optimize_L: max_iter must be >= 1");
  const auto& ls = cfg.line_search;

  OptResult res;
  res.L = L0;
  CostEval cur = cost(res.L);
  Matrix grad = project_tangent(res.L, cur.grad);
  double gnorm2 = grad.squaredNorm();
  res.cost = cur.value;
  res.grad_norm = std::sqrt(gnorm2);
  res.cost_history.push_back(cur.value);
  if (res.grad_norm <= cfg.grad_tol) {
    res.status = OptStatus::converged;
    return res;
  }

  const Index d = L0.rows(), l = L0.cols();
  const Index restart_every = std::max<Index>(1, l * (d - l));
  Matrix dir = -grad;
  Index since_restart = 0;

  for (int it = 0; it < cfg.max_iter; ++it) {
    double slope = grad.cwiseProduct(dir).sum();
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -gnorm2;
      since_restart = 0;
    }

    double t = ls.initial_step;
    bool accepted = false;
    Matrix cand;
    CostEval next;
    for (int b = 0; b <= ls.max_backtracks; ++b, t *= ls.contraction) {
      try {
        cand = retract(res.L, dir, t);
      } catch (const NumericalError&) {
        continue;
      }
      next = cost(cand);
      if (std::isfinite(next.value) &&
          next.value <= cur.value + ls.sufficient_decrease * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = OptStatus::line_search_failed;
      return res;
    }

    const Matrix grad_new = project_tangent(cand, next.grad);
    const double gnorm2_new = grad_new.squaredNorm();
    if (cfg.method == RiemannMethod::cg && ++since_restart < restart_every && gnorm2 > 0.0) {
      const double beta = gnorm2_new / gnorm2;
      dir = -grad_new + beta * project_tangent(cand, dir);
    } else {
      dir = -grad_new;
      since_restart = 0;
    }

    res.L = std::move(cand);
    cur = std::move(next);
    grad = grad_new;
    gnorm2 = gnorm2_new;
    res.cost = cur.value;
    res.grad_norm = std::sqrt(gnorm2);
    res.iterations = it + 1;
    res.cost_history.push_back(cur.value);
    if (res.grad_norm <= cfg.grad_tol) {
      res.status = OptStatus::converged;
      return res;
    }
  }
  res.status = OptStatus::max_iter;
  return res;
}

}  // namespace ssdml
