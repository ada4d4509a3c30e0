#pragma once

// A small fully connected embedding network with an optional final
// l2-normalization layer, hand-written forward/backward passes and plain
// gradient-descent updates.
//
// Inputs and outputs are column-per-example: forward maps D x B to d x B.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/random.hpp"

namespace ssdml {

enum class Activation { none, relu };

inline const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "none"; }

struct Layer {
  Matrix W;  // out x in
  Vector b;  // out
  Activation act = Activation::none;
};

struct EmbedNet {
  std::vector<Layer> layers;
  bool normalize = true;
  double eps = 1e-12;  // guard in v / (||v|| + eps)

  /// Bumped on every parameter update; forward caches record it.
  std::uint64_t version = 0;

  Index in_dim() const { return layers.empty() ? 0 : layers.front().W.cols(); }
  Index out_dim() const { return layers.empty() ? 0 : layers.back().W.rows(); }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.W.size() + l.b.size());
    return n;
  }

  void validate() const {
    require(!layers.empty(), "embednet: no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      require(layers[i].b.size() == layers[i].W.rows(), "embednet: bias/weight shape mismatch");
      if (i > 0)
        require(layers[i].W.cols() == layers[i - 1].W.rows(),
                "embednet: layer " + std::to_string(i) + " does not compose with its predecessor");
    }
  }
};

/// MLP with widths {D, h1, ..., d}: ReLU on hidden layers, affine output.
/// Weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), biases zero.
inline EmbedNet make_mlp(const std::vector<Index>& widths, std::uint64_t seed, bool normalize = true) {
  require(widths.size() >= 2, "make_mlp: need at least input and output widths");
  for (const Index w : widths) require(w >= 1, "make_mlp: widths must be positive");
  Rng rng(derive_seed(seed, 0x1417));
  EmbedNet net;
  net.normalize = normalize;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer layer;
    const double bound = std::sqrt(6.0 / static_cast<double>(widths[i]));
    layer.W.resize(widths[i + 1], widths[i]);
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) layer.W(r, c) = rng.uniform(-bound, bound);
    layer.b = Vector::Zero(widths[i + 1]);
    layer.act = (i + 2 < widths.size()) ? Activation::relu : Activation::none;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

struct ForwardCache {
  std::uint64_t version = 0;
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<Matrix> pre;     // W x + b of each layer
  Matrix raw;                  // network output before normalization
  Vector norms;                // column norms of raw
};

struct ForwardResult {
  Matrix out;
  ForwardCache cache;
};

inline ForwardResult forward(const EmbedNet& net, const Matrix& x) {
  require(!net.layers.empty(), "forward: empty network");
  require(x.rows() == net.in_dim(), "forward: input has " + std::to_string(x.rows()) +
                                        " rows, network expects " + std::to_string(net.in_dim()));
  ForwardResult res;
  res.cache.version = net.version;
  Matrix h = x;
  for (const auto& layer : net.layers) {
    res.cache.inputs.push_back(h);
    Matrix z = layer.W * h;
    z.colwise() += layer.b;
    res.cache.pre.push_back(z);
    h = layer.act == Activation::relu ? Matrix(z.cwiseMax(0.0)) : z;
  }
  res.cache.raw = h;
  if (net.normalize) {
    res.cache.norms = h.colwise().norm().transpose();
    for (Index j = 0; j < h.cols(); ++j) h.col(j) /= res.cache.norms(j) + net.eps;
  }
  res.out = std::move(h);
  return res;
}

/// Embeddings only.
inline Matrix embed(const EmbedNet& net, const Matrix& x) { return forward(net, x).out; }

struct NetGradients {
  std::vector<Matrix> dW;
  std::vector<Vector> db;
  Matrix dX;  // gradient w.r.t. the network input

  double squared_norm() const {
    double s = 0.0;
    for (const auto& g : dW) s += g.squaredNorm();
    for (const auto& g : db) s += g.squaredNorm();
    return s;
  }
};

/// Reverse pass for dZ = dJ/d(output). The cache must come from forward()
/// on this net with no parameter update in between.
inline NetGradients backward(const EmbedNet& net, const ForwardCache& cache, const Matrix& dz) {
  require(cache.version == net.version && cache.pre.size() == net.layers.size(),
          "backward: stale forward cache");
  require(dz.rows() == cache.raw.rows() && dz.cols() == cache.raw.cols(),
          "backward: gradient shape does not match forward output");

  Matrix delta = dz;
  if (net.normalize) {
    // y = v / (n + eps):  dv = (I - u u^T) dy / (n + eps) with u = v / n.
    // Differs from the exact Jacobian of the guarded map by O(eps) and keeps
    // radial directions in its null space.
    for (Index j = 0; j < delta.cols(); ++j) {
      const double n = cache.norms(j);
      Vector dv = dz.col(j);
      if (n > 0.0) {
        const Vector u = cache.raw.col(j) / n;
        dv -= u * u.dot(dv);
      }
      delta.col(j) = dv / (n + net.eps);
    }
  }

  NetGradients g;
  g.dW.resize(net.layers.size());
  g.db.resize(net.layers.size());
  for (std::size_t i = net.layers.size(); i-- > 0;) {
    const auto& layer = net.layers[i];
    if (layer.act == Activation::relu) delta = delta.cwiseProduct((cache.pre[i].array() > 0.0).cast<double>().matrix());
    g.dW[i] = delta * cache.inputs[i].transpose();
    g.db[i] = delta.rowwise().sum();
    delta = layer.W.transpose() * delta;
  }
  g.dX = std::move(delta);
  return g;
}

enum class LrSchedule { constant, inv_sqrt };

struct SGDConfig {
  double lr = 1e-4;
  LrSchedule schedule = LrSchedule::constant;
  int epochs_per_partition = 10;
};

/// Learning rate at step t >= 1.
inline double learning_rate(const SGDConfig& cfg, std::uint64_t t) {
  if (cfg.schedule == LrSchedule::inv_sqrt) return cfg.lr / std::sqrt(static_cast<double>(std::max<std::uint64_t>(t, 1)));
  return cfg.lr;
}

/// theta <- theta - lr(t) * grad
inline void sgd_step(EmbedNet& net, const NetGradients& grads, const SGDConfig& cfg, std::uint64_t t) {
  require(cfg.lr > 0.0, "sgd_step: lr must be positive");
  require(grads.dW.size() == net.layers.size() && grads.db.size() == net.layers.size(),
          "sgd_step: gradient/layer count mismatch");
  const double lr = learning_rate(cfg, t);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    require(grads.dW[i].rows() == net.layers[i].W.rows() && grads.dW[i].cols() == net.layers[i].W.cols() &&
                grads.db[i].size() == net.layers[i].b.size(),
            "sgd_step: gradient shape mismatch in layer " + std::to_string(i));
    net.layers[i].W -= lr * grads.dW[i];
    net.layers[i].b -= lr * grads.db[i];
  }
  ++net.version;
}

}  // namespace ssdml
