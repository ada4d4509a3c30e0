#pragma once

// File formats.
//
// Checkpoint (JSON):
//   { "format": "ssdml-checkpoint", "version": 1,
//     "net": { "normalize": bool, "eps": number,
//              "layers": [ { "in": D_i, "out": D_{i+1}, "activation": "relu"|"none",
//                            "weight": [row-major out x in], "bias": [out] } ] },
//     "L": { "rows": d, "cols": l, "data": [row-major d x l] } }      (L optional)
// Training log (JSON lines): one {"type": "step", ...} object per
// alternate step, one {"type": "round", ...} object per round.
// Eval report (JSON): { "nmi": %, "recall": { "K": % }, "n_test": n, "seed": s }.
// Matrices and embeddings are written as headered CSV.

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "ssdml/dataset.hpp"
#include "ssdml/embednet.hpp"
#include "ssdml/eval.hpp"
#include "ssdml/mining.hpp"
#include "ssdml/trainer.hpp"

namespace ssdml {

using json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows * cols) throw Error("checkpoint: matrix data has wrong length");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = data.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  return m;
}

inline json net_to_json(const EmbedNet& net) {
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json w = json::array(), b = json::array();
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) w.push_back(layer.W(r, c));
    for (Index r = 0; r < layer.b.size(); ++r) b.push_back(layer.b(r));
    layers.push_back({{"in", layer.W.cols()},
                      {"out", layer.W.rows()},
                      {"activation", to_string(layer.act)},
                      {"weight", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return {{"normalize", net.normalize}, {"eps", net.eps}, {"layers", std::move(layers)}};
}

inline EmbedNet net_from_json(const json& j) {
  EmbedNet net;
  net.normalize = j.at("normalize").get<bool>();
  net.eps = j.at("eps").get<double>();
  for (const auto& lj : j.at("layers")) {
    Layer layer;
    const auto in = lj.at("in").get<Index>(), out = lj.at("out").get<Index>();
    const auto act = lj.at("activation").get<std::string>();
    if (act != "relu" && act != "none") throw Error("checkpoint: unknown activation '" + act + "'");
    layer.act = act == "relu" ? Activation::relu : Activation::none;
    const auto& w = lj.at("weight");
    const auto& b = lj.at("bias");
    if (static_cast<Index>(w.size()) != in * out || static_cast<Index>(b.size()) != out)
      throw Error("checkpoint: layer parameter count does not match its shape");
    layer.W.resize(out, in);
    for (Index r = 0; r < out; ++r)
      for (Index c = 0; c < in; ++c) layer.W(r, c) = w.at(static_cast<std::size_t>(r * in + c)).get<double>();
    layer.b.resize(out);
    for (Index r = 0; r < out; ++r) layer.b(r) = b.at(static_cast<std::size_t>(r)).get<double>();
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

struct Checkpoint {
  EmbedNet net;
  std::optional<Matrix> L;
};

inline void save_checkpoint(const std::filesystem::path& path, const EmbedNet& net,
                            const std::optional<Matrix>& L) {
  json j{{"format", "ssdml-checkpoint"}, {"version", kCheckpointVersion}, {"net", net_to_json(net)}};
  if (L) j["L"] = matrix_to_json(*L);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
    if (j.at("format").get<std::string>() != "ssdml-checkpoint")
      throw Error("checkpoint: not an ssdml checkpoint: " + path.string());
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error("checkpoint: unsupported version in " + path.string());
    Checkpoint ck{net_from_json(j.at("net")), std::nullopt};
    if (j.contains("L")) ck.L = matrix_from_json(j.at("L"));
    return ck;
  } catch (const json::exception& e) {
    throw Error("checkpoint " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

inline json to_json(const StepRecord& s) {
  json j{{"type", "step"},
         {"step", s.step},
         {"round", s.round},
         {"epoch", s.epoch},
         {"batch", s.batch},
         {"batch_size", s.batch_size},
         {"j_before", s.j_before},
         {"j_after_L", s.j_after_L},
         {"grad_L_norm", s.grad_L_norm},
         {"riemann_iters", s.riemann_iters},
         {"riemann_status", to_string(s.riemann_status)},
         {"grad_theta_norm", s.grad_theta_norm},
         {"lr", s.lr}};
  if (s.j_after_theta) j["j_after_theta"] = *s.j_after_theta;
  if (s.wall_ms) j["wall_ms"] = *s.wall_ms;
  return j;
}

inline json to_json(const RoundRecord& r) {
  json j{{"type", "round"},
         {"round", r.round},
         {"partition_size", r.partition_size},
         {"n_triplets", r.n_triplets},
         {"n_batches", r.n_batches},
         {"mean_step_j", r.mean_step_j},
         {"j_end", r.j_end}};
  if (r.val_recall1) j["val_recall1"] = *r.val_recall1;
  if (r.val_nmi) j["val_nmi"] = *r.val_nmi;
  return j;
}

/// Steps of each round followed by that round's summary line.
inline void write_log_jsonl(std::ostream& out, const TrainLog& log) {
  std::size_t s = 0;
  for (const auto& r : log.rounds) {
    for (; s < log.steps.size() && log.steps[s].round <= r.round; ++s) out << to_json(log.steps[s]).dump() << '\n';
    out << to_json(r).dump() << '\n';
  }
  for (; s < log.steps.size(); ++s) out << to_json(log.steps[s]).dump() << '\n';
}

inline void write_log_jsonl(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_log_jsonl(out, log);
}

inline json to_json(const EvalReport& r) {
  json recall = json::object();
  for (const auto& [k, v] : r.recall) recall[std::to_string(k)] = v;
  return {{"nmi", r.nmi}, {"recall", std::move(recall)}, {"n_test", r.n_test}, {"seed", r.seed}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Rows of `m` under a header prefix0..prefix{c-1}.
inline void save_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::string& prefix = "c") {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << prefix << c;
  out << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << detail::format_double(m(r, c));
    out << '\n';
  }
}

/// One embedding per row (e0..e{d-1}) plus its label cell.
inline void save_embeddings_csv(const std::filesystem::path& path, const Matrix& rows,
                                std::span<const Label> labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Index c = 0; c < rows.cols(); ++c) out << 'e' << c << ',';
  out << "label\n";
  for (Index r = 0; r < rows.rows(); ++r) {
    for (Index c = 0; c < rows.cols(); ++c) out << detail::format_double(rows(r, c)) << ',';
    if (const auto& y = labels[static_cast<std::size_t>(r)]) out << *y;
    out << '\n';
  }
}

inline void save_triplets_csv(const std::filesystem::path& path, std::span<const Triplet> ts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "a,p,n\n";
  for (const auto& t : ts) out << t.a << ',' << t.p << ',' << t.n << '\n';
}

}  // namespace ssdml
