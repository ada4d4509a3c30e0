#pragma once

// Alternating optimization of the metric factor L and the embedding network.
//
// Per round: sample a partition (all labeled rows + some unlabeled rows),
// embed it, build the affinity graph on the l2-normalized embeddings,
// propagate, mine triplets, then for every mini-batch run a Riemannian
// L-phase with the network fixed followed by one gradient step on the
// network with L fixed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/dataset.hpp"
#include "ssdml/embednet.hpp"
#include "ssdml/eval.hpp"
#include "ssdml/graph.hpp"
#include "ssdml/manifold.hpp"
#include "ssdml/metric_loss.hpp"
#include "ssdml/mining.hpp"

namespace ssdml {

enum class TrainMode {
  stochastic,  // fresh partition per round, shuffled mini-batches
  fullbatch,   // one partition, all its triplets as a single batch, descent-only network steps
};

struct TrainConfig {
  double gamma = 0.99;
  int k = 10;
  double alpha = 40.0;  // degrees
  Index l = 64;
  Index t_b = 100;
  Index n_p = 9000;
  int rounds = 5;
  RiemannianOptConfig riemann;
  SGDConfig sgd;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::stochastic;
  double min_affinity_gap = 0.0;
  int max_lr_halvings = 20;       // fullbatch network-step acceptance
  double early_stop_grad_tol = 0.0;  // 0 disables
  bool log_wall_time = false;     // wall time breaks byte-identical logs

  void validate(Index d) const {
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(k >= 2, "k must be >= 2");
    require(alpha > 0.0 && alpha < 90.0, "alpha must lie in (0, 90)");
    require(l >= 1 && l <= d, "l must satisfy 1 <= l <= d (l=" + std::to_string(l) +
                                  ", d=" + std::to_string(d) + ")");
    require(t_b >= 1, "t_b must be >= 1");
    require(n_p >= 1, "n_p must be >= 1");
    require(rounds >= 0, "rounds must be >= 0");
    require(riemann.max_iter >= 1, "riemann.max_iter must be >= 1");
    require(sgd.lr > 0.0, "sgd.lr must be positive");
    require(sgd.epochs_per_partition >= 1, "epochs_per_partition must be >= 1");
  }
};

struct StepRecord {
  std::uint64_t step = 0;
  int round = 0;
  int epoch = 0;
  int batch = 0;
  Index batch_size = 0;
  double j_before = 0.0;
  double j_after_L = 0.0;
  std::optional<double> j_after_theta;  // fullbatch only
  double grad_L_norm = 0.0;             // Riemannian gradient norm after the L-phase
  int riemann_iters = 0;
  OptStatus riemann_status = OptStatus::max_iter;
  double grad_theta_norm = 0.0;
  double lr = 0.0;  // applied learning rate, 0 when the step was rejected
  std::optional<double> wall_ms;
};

struct RoundRecord {
  int round = 0;
  Index partition_size = 0;
  Index n_triplets = 0;
  Index n_batches = 0;
  double mean_step_j = 0.0;
  double j_end = 0.0;  // objective over all mined triplets at the end of the round
  std::optional<double> val_recall1;
  std::optional<double> val_nmi;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<RoundRecord> rounds;
};

struct TrainState {
  EmbedNet net;
  Matrix L;
  std::uint64_t step = 0;
};

struct TrainResult {
  EmbedNet net;
  Matrix L;
  TrainLog log;
  int best_round = 0;  // round whose parameters were returned, 0 = initial
};

struct RoundSnapshot {
  int round;
  const EmbedNet& net;
  const Matrix& L;
  const RoundRecord& record;
};

struct TrainOptions {
  const Dataset* validation = nullptr;
  std::vector<int> val_ks{1};
  std::function<void(const RoundSnapshot&)> on_round;
};

namespace detail {

struct LocalBatch {
  std::vector<Index> nodes;  // distinct node ids, ascending
  TripletBatch batch;        // indices into `nodes`
};

inline LocalBatch localize(const TripletBatch& batch, Index n_nodes) {
  std::vector<Index> slot(static_cast<std::size_t>(n_nodes), -1);
  for (const auto& t : batch.triplets)
    for (const Index v : {t.a, t.p, t.n}) {
      require(v >= 0 && v < n_nodes, "alternate_step: triplet index out of range");
      slot[static_cast<std::size_t>(v)] = 0;
    }
  LocalBatch lb;
  for (Index v = 0; v < n_nodes; ++v)
    if (slot[static_cast<std::size_t>(v)] == 0) {
      slot[static_cast<std::size_t>(v)] = static_cast<Index>(lb.nodes.size());
      lb.nodes.push_back(v);
    }
  lb.batch.triplets.reserve(batch.triplets.size());
  for (const auto& t : batch.triplets)
    lb.batch.triplets.push_back({slot[static_cast<std::size_t>(t.a)], slot[static_cast<std::size_t>(t.p)],
                                 slot[static_cast<std::size_t>(t.n)]});
  return lb;
}

inline Matrix gather_columns(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

inline double batch_objective(const EmbedNet& net, const Matrix& L, const LossConfig& lc,
                              const Matrix& x, const TripletBatch& local) {
  auto bm = build_batch(embed(net, x), local);
  return loss(L, lc, bm);
}

}  // namespace detail

/// One L-phase (Riemannian optimization, network fixed) followed by one
/// network phase (single gradient step, L fixed) on `batch`. Triplet
/// indices address columns of `inputs` (D x n_nodes).
inline StepRecord alternate_step(TrainState& state, const Matrix& inputs, const TripletBatch& batch,
                                 const TrainConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const LossConfig lc = LossConfig::from_degrees(cfg.alpha);
  const auto local = detail::localize(batch, inputs.cols());
  const Matrix x = detail::gather_columns(inputs, local.nodes);

  auto fwd = forward(state.net, x);
  auto bm = build_batch(fwd.out, local.batch);

  StepRecord rec;
  rec.batch_size = batch.size();
  rec.j_before = loss(state.L, lc, bm);

  BatchMatrices work = bm;
  auto cost = [&](const Matrix& L) {
    CostEval ev;
    ev.value = loss(L, lc, work);
    ev.grad = grad_L(L, lc, work);
    return ev;
  };
  const auto opt = optimize_L(state.L, cost, cfg.riemann);
  state.L = opt.L;
  rec.grad_L_norm = opt.grad_norm;
  rec.riemann_iters = opt.iterations;
  rec.riemann_status = opt.status;

  rec.j_after_L = loss(state.L, lc, bm);
  const Matrix dz = grad_points(state.L, lc, bm, local.batch, x.cols());
  const auto grads = backward(state.net, fwd.cache, dz);
  rec.grad_theta_norm = std::sqrt(grads.squared_norm());
  ++state.step;
  rec.step = state.step;

  if (cfg.mode == TrainMode::stochastic) {
    rec.lr = learning_rate(cfg.sgd, state.step);
    sgd_step(state.net, grads, cfg.sgd, state.step);
  } else {
    // accept the network step only if it lowers J; otherwise halve lr and retry
    SGDConfig trial = cfg.sgd;
    rec.j_after_theta = rec.j_after_L;
    for (int h = 0; h <= cfg.max_lr_halvings; ++h, trial.lr *= 0.5) {
      EmbedNet cand = state.net;
      sgd_step(cand, grads, trial, state.step);
      const double j_new = detail::batch_objective(cand, state.L, lc, x, local.batch);
      if (j_new < rec.j_after_L) {
        state.net = std::move(cand);
        rec.j_after_theta = j_new;
        rec.lr = learning_rate(trial, state.step);
        break;
      }
    }
  }
  if (cfg.log_wall_time)
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Runs cfg.rounds rounds from (net0, L0). With a validation set the
/// parameters of the round with the best validation Recall@1 (ties: NMI,
/// then earliest) are returned instead of the last ones.
inline TrainResult train(const Dataset& ds, const EmbedNet& net0, const Matrix& L0,
                         const TrainConfig& cfg, const TrainOptions& opts = {}) {
  net0.validate();
  cfg.validate(net0.out_dim());
  require(L0.rows() == net0.out_dim() && L0.cols() == cfg.l, "train: L0 must be d x l");
  require(orthonormality_error(L0) <= kOrthonormalTol, "train: L0 is not orthonormal");
  require(ds.dim() == net0.in_dim(), "train: dataset dimension does not match network input");

  TrainResult out{net0, L0, {}, 0};
  if (cfg.rounds == 0) return out;
  require(ds.num_labeled() > 0 && ds.num_unlabeled() > 0,
          "train: dataset needs both labeled and unlabeled examples");

  const LossConfig lc = LossConfig::from_degrees(cfg.alpha);
  TrainState state{net0, L0, 0};
  const Matrix all_inputs = ds.features.transpose();

  struct Best {
    double r1 = -1.0, nmi = -1.0;
  } best;
  std::vector<int> val_labels;
  if (opts.validation) {
    for (const auto& y : opts.validation->labels) {
      require(y.has_value(), "train: validation examples must all be labeled");
      val_labels.push_back(*y);
    }
  }

  Matrix node_inputs;
  std::vector<Triplet> triplets;
  Index partition_size = 0;

  for (int r = 1; r <= cfg.rounds; ++r) {
    if (cfg.mode == TrainMode::stochastic || r == 1) {
      const Partition part = sample_partition(ds, cfg.n_p, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      const auto nodes = part.nodes();
      partition_size = part.size();
      node_inputs = detail::gather_columns(all_inputs, nodes);
      std::vector<Label> node_labels;
      node_labels.reserve(nodes.size());
      for (const Index v : nodes) node_labels.push_back(ds.labels[static_cast<std::size_t>(v)]);
      const Matrix emb = embed(state.net, node_inputs);
      const auto graph = build_affinity_graph(emb.transpose(), node_labels, cfg.k, cfg.gamma);
      triplets = mine_triplets(graph, cfg.min_affinity_gap);
    }

    RoundRecord rr;
    rr.round = r;
    rr.partition_size = partition_size;
    rr.n_triplets = static_cast<Index>(triplets.size());
    double j_sum = 0.0, max_gl = 0.0, max_gt = 0.0;
    Index n_steps = 0;
    for (int e = 1; e <= cfg.sgd.epochs_per_partition; ++e) {
      std::vector<TripletBatch> batches;
      if (cfg.mode == TrainMode::fullbatch) {
        if (!triplets.empty()) batches.push_back(TripletBatch{triplets});
      } else {
        batches = batch_triplets(triplets, cfg.t_b,
                                 derive_seed(cfg.seed, (static_cast<std::uint64_t>(r) << 20) + static_cast<std::uint64_t>(e)));
      }
      rr.n_batches = static_cast<Index>(batches.size());
      for (std::size_t b = 0; b < batches.size(); ++b) {
        StepRecord rec = alternate_step(state, node_inputs, batches[b], cfg);
        rec.round = r;
        rec.epoch = e;
        rec.batch = static_cast<int>(b);
        if (!std::isfinite(rec.j_before) || !std::isfinite(rec.j_after_L))
          throw NumericalError("train: non-finite objective in round " + std::to_string(r) +
                               ", batch " + std::to_string(b));
        j_sum += rec.j_before;
        max_gl = std::max(max_gl, rec.grad_L_norm);
        max_gt = std::max(max_gt, rec.grad_theta_norm);
        ++n_steps;
        out.log.steps.push_back(rec);
      }
    }
    rr.mean_step_j = n_steps > 0 ? j_sum / static_cast<double>(n_steps) : 0.0;
    if (cfg.mode == TrainMode::fullbatch && !out.log.steps.empty() && n_steps > 0)
      rr.j_end = *out.log.steps.back().j_after_theta;
    else if (!triplets.empty())
      rr.j_end = detail::batch_objective(state.net, state.L, lc, node_inputs, TripletBatch{triplets});

    if (opts.validation) {
      const Matrix val_emb = embed(state.net, opts.validation->features.transpose()).transpose();
      const auto rep = evaluate(val_emb, val_labels, opts.val_ks, cfg.seed);
      rr.val_nmi = rep.nmi;
      rr.val_recall1 = rep.recall.begin()->second;
      if (*rr.val_recall1 > best.r1 || (*rr.val_recall1 == best.r1 && rep.nmi > best.nmi)) {
        best = {*rr.val_recall1, rep.nmi};
        out.net = state.net;
        out.L = state.L;
        out.best_round = r;
      }
    }
    out.log.rounds.push_back(rr);
    if (opts.on_round) opts.on_round(RoundSnapshot{r, state.net, state.L, out.log.rounds.back()});
    if (cfg.early_stop_grad_tol > 0.0 && n_steps > 0 && max_gl <= cfg.early_stop_grad_tol &&
        max_gt <= cfg.early_stop_grad_tol)
      break;
  }

  if (!opts.validation) {
    out.net = state.net;
    out.L = state.L;
    out.best_round = static_cast<int>(out.log.rounds.size());
  }
  return out;
}

}  // namespace ssdml
