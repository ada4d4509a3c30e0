#pragma once

// Command-line front end: synth, train, eval, propagate-debug.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssdml/io.hpp"
#include "ssdml/ssdml.hpp"

namespace ssdml::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Configuration problem; `path` names the offending field (e.g. "train.l").
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  BlobSpec blobs;
  int test_per_class = 0;  // 0 = no test set
};

struct RunConfig {
  std::optional<fs::path> train_csv;
  std::optional<fs::path> test_csv;
  std::optional<SynthSpec> synth;
  std::string label_column = "label";
  double validation_fraction = 0.0;  // 0 = no validation split

  std::vector<Index> hidden{64};
  Index out_dim = 32;
  bool normalize = true;
  std::uint64_t net_seed = 1;

  TrainConfig train;

  std::vector<int> ks{1, 2, 4, 8};
  bool project_L = false;
  std::uint64_t eval_seed = 0;
};

// ---------------------------------------------------------------------------
// Config parsing with strict key checking

namespace detail {

class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  /// Rejects keys that were never looked up.
  void done() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(join(key), "unknown key");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(join(key), "wrong type");
    }
  }

  void get_number(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!j_.at(key).is_number()) throw ConfigError(join(key), "expected a number");
    out = j_.at(key).get<double>();
  }

  template <class T>
  void get_integer(const std::string& key, T& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(key), "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0)
        out = v.get<T>();
      else
        throw ConfigError(join(key), "expected a non-negative integer");
    } else {
      out = v.get<T>();
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool cond, const std::string& path, const std::string& msg) {
  if (!cond) throw ConfigError(path, msg);
}

}  // namespace detail

inline RunConfig parse_config(const json& root, const fs::path& base_dir = {}) {
  RunConfig rc;
  detail::Fields top(root, "");

  if (top.has("data")) {
    detail::Fields data(top.at("data"), "data");
    std::string path;
    if (data.has("train")) {
      data.get("train", path);
      rc.train_csv = base_dir / path;
    }
    if (data.has("test")) {
      data.get("test", path);
      rc.test_csv = base_dir / path;
    }
    data.get("label_column", rc.label_column);
    data.get_number("validation_fraction", rc.validation_fraction);
    detail::check(rc.validation_fraction >= 0.0 && rc.validation_fraction < 1.0,
                  "data.validation_fraction", "must lie in [0, 1)");
    if (data.has("synth")) {
      detail::Fields s(data.at("synth"), "data.synth");
      SynthSpec spec;
      s.get_integer("seed", spec.seed);
      s.get_integer("classes", spec.blobs.classes);
      s.get_integer("per_class", spec.blobs.per_class);
      s.get_integer("dim", spec.blobs.dim);
      s.get_number("spread", spec.blobs.spread);
      s.get_number("separation", spec.blobs.separation);
      s.get_number("label_fraction", spec.blobs.label_fraction);
      s.get_integer("test_per_class", spec.test_per_class);
      detail::check(spec.blobs.classes >= 2, "data.synth.classes", "must be >= 2");
      detail::check(spec.blobs.per_class >= 2, "data.synth.per_class", "must be >= 2");
      detail::check(spec.blobs.dim >= 1, "data.synth.dim", "must be >= 1");
      detail::check(spec.blobs.label_fraction > 0.0 && spec.blobs.label_fraction <= 1.0,
                    "data.synth.label_fraction", "must lie in (0, 1]");
      detail::check(spec.test_per_class >= 0, "data.synth.test_per_class", "must be >= 0");
      s.done();
      rc.synth = spec;
    }
    detail::check(rc.train_csv.has_value() != rc.synth.has_value(), "data",
                  "exactly one of data.train or data.synth is required");
    detail::check(!(rc.test_csv && rc.synth && rc.synth->test_per_class > 0), "data.test",
                  "conflicts with data.synth.test_per_class");
    data.done();
  } else {
    throw ConfigError("data", "missing");
  }

  if (top.has("net")) {
    detail::Fields net(top.at("net"), "net");
    if (net.has("hidden")) {
      const auto& h = net.at("hidden");
      detail::check(h.is_array(), "net.hidden", "expected an array of widths");
      rc.hidden.clear();
      for (const auto& w : h) {
        detail::check(w.is_number_integer() && w.get<long long>() >= 1, "net.hidden", "widths must be positive integers");
        rc.hidden.push_back(w.get<Index>());
      }
    }
    net.get_integer("out_dim", rc.out_dim);
    net.get("normalize", rc.normalize);
    net.get_integer("seed", rc.net_seed);
    detail::check(rc.out_dim >= 1, "net.out_dim", "must be >= 1");
    net.done();
  }

  auto& tc = rc.train;
  if (top.has("train")) {
    detail::Fields t(top.at("train"), "train");
    t.get_number("gamma", tc.gamma);
    t.get_integer("k", tc.k);
    t.get_number("alpha", tc.alpha);
    t.get_integer("l", tc.l);
    t.get_integer("t_b", tc.t_b);
    t.get_integer("n_p", tc.n_p);
    t.get_integer("rounds", tc.rounds);
    t.get_integer("epochs_per_partition", tc.sgd.epochs_per_partition);
    t.get_integer("seed", tc.seed);
    t.get_number("min_affinity_gap", tc.min_affinity_gap);
    t.get_integer("max_lr_halvings", tc.max_lr_halvings);
    t.get_number("early_stop_grad_tol", tc.early_stop_grad_tol);
    if (t.has("mode")) {
      std::string mode;
      t.get("mode", mode);
      detail::check(mode == "stochastic" || mode == "fullbatch", "train.mode", "must be 'stochastic' or 'fullbatch'");
      tc.mode = mode == "fullbatch" ? TrainMode::fullbatch : TrainMode::stochastic;
    }
    if (t.has("riemann")) {
      detail::Fields r(t.at("riemann"), "train.riemann");
      r.get_integer("max_iter", tc.riemann.max_iter);
      if (r.has("method")) {
        std::string m;
        r.get("method", m);
        detail::check(m == "gd" || m == "cg", "train.riemann.method", "must be 'gd' or 'cg'");
        tc.riemann.method = m == "cg" ? RiemannMethod::cg : RiemannMethod::gd;
      }
      r.get_number("initial_step", tc.riemann.line_search.initial_step);
      r.get_number("contraction", tc.riemann.line_search.contraction);
      r.get_number("sufficient_decrease", tc.riemann.line_search.sufficient_decrease);
      r.get_integer("max_backtracks", tc.riemann.line_search.max_backtracks);
      r.get_number("grad_tol", tc.riemann.grad_tol);
      const auto& ls = tc.riemann.line_search;
      detail::check(ls.initial_step > 0.0, "train.riemann.initial_step", "must be positive");
      detail::check(ls.contraction > 0.0 && ls.contraction < 1.0, "train.riemann.contraction", "must lie in (0, 1)");
      detail::check(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0,
                    "train.riemann.sufficient_decrease", "must lie in (0, 1)");
      detail::check(ls.max_backtracks >= 0, "train.riemann.max_backtracks", "must be >= 0");
      r.done();
    }
    if (t.has("sgd")) {
      detail::Fields s(t.at("sgd"), "train.sgd");
      s.get_number("lr", tc.sgd.lr);
      if (s.has("schedule")) {
        std::string sch;
        s.get("schedule", sch);
        detail::check(sch == "constant" || sch == "inv_sqrt", "train.sgd.schedule", "must be 'constant' or 'inv_sqrt'");
        tc.sgd.schedule = sch == "inv_sqrt" ? LrSchedule::inv_sqrt : LrSchedule::constant;
      }
      s.done();
    }
    t.done();
  }

  if (top.has("eval")) {
    detail::Fields e(top.at("eval"), "eval");
    if (e.has("ks")) {
      const auto& ks = e.at("ks");
      detail::check(ks.is_array() && !ks.empty(), "eval.ks", "expected a non-empty array");
      rc.ks.clear();
      for (const auto& k : ks) {
        detail::check(k.is_number_integer() && k.get<long long>() >= 1, "eval.ks", "values must be positive integers");
        rc.ks.push_back(k.get<int>());
      }
    }
    e.get("project_L", rc.project_L);
    e.get_integer("seed", rc.eval_seed);
    e.done();
  }
  top.done();
  return rc;
}

/// Cross-field checks that need the whole config.
inline void validate_config(const RunConfig& rc) {
  const auto& tc = rc.train;
  detail::check(tc.l >= 1 && tc.l <= rc.out_dim, "train.l",
                "must satisfy 1 <= l <= net.out_dim (l=" + std::to_string(tc.l) +
                    ", d=" + std::to_string(rc.out_dim) + ")");
  detail::check(tc.gamma > 0.0 && tc.gamma < 1.0, "train.gamma", "must lie in (0, 1)");
  detail::check(tc.k >= 2, "train.k", "must be >= 2");
  detail::check(tc.alpha > 0.0 && tc.alpha < 90.0, "train.alpha", "must lie in (0, 90) degrees");
  detail::check(tc.t_b >= 1, "train.t_b", "must be >= 1");
  detail::check(tc.n_p >= 1, "train.n_p", "must be >= 1");
  detail::check(tc.rounds >= 0, "train.rounds", "must be >= 0");
  detail::check(tc.sgd.epochs_per_partition >= 1, "train.epochs_per_partition", "must be >= 1");
  detail::check(tc.riemann.max_iter >= 1, "train.riemann.max_iter", "must be >= 1");
  detail::check(tc.sgd.lr > 0.0, "train.sgd.lr", "must be positive");
  detail::check(tc.max_lr_halvings >= 0, "train.max_lr_halvings", "must be >= 0");
}

inline RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  auto rc = parse_config(j, path.parent_path());
  validate_config(rc);
  return rc;
}

// ---------------------------------------------------------------------------
// Shared steps

struct LoadedData {
  Dataset train;
  std::optional<Dataset> val;
  std::optional<Dataset> test;
};

inline LoadedData load_data(const RunConfig& rc) {
  LoadedData d;
  if (rc.synth) {
    d.train = gen_blobs(rc.synth->seed, rc.synth->blobs);
    if (rc.synth->test_per_class > 0) d.test = gen_blobs_test(rc.synth->seed, rc.synth->blobs, rc.synth->test_per_class);
  } else {
    d.train = load_csv(*rc.train_csv, rc.label_column);
  }
  if (rc.test_csv) d.test = load_csv(*rc.test_csv, rc.label_column);
  if (rc.validation_fraction > 0.0) {
    auto split = validation_split(d.train, rc.validation_fraction, derive_seed(rc.train.seed, 0x7A1));
    d.train = std::move(split.train);
    d.val = std::move(split.val);
  }
  return d;
}

inline std::vector<int> require_all_labels(const Dataset& ds, const std::string& what) {
  std::vector<int> out;
  out.reserve(ds.labels.size());
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    if (!ds.labels[i]) throw Error(what + ": row " + std::to_string(i) + " has no label");
    out.push_back(*ds.labels[i]);
  }
  return out;
}

/// Rows are examples. With `L`, embeddings are projected to L^T z.
inline Matrix embed_rows(const EmbedNet& net, const Dataset& ds, const std::optional<Matrix>& L) {
  Matrix z = embed(net, ds.features.transpose());
  if (L) z = L->transpose() * z;
  return z.transpose();
}

inline EmbedNet initial_net(const RunConfig& rc, Index in_dim) {
  std::vector<Index> widths{in_dim};
  widths.insert(widths.end(), rc.hidden.begin(), rc.hidden.end());
  widths.push_back(rc.out_dim);
  return make_mlp(widths, rc.net_seed, rc.normalize);
}

inline Matrix initial_L(const RunConfig& rc) {
  return random_orthonormal(rc.out_dim, rc.train.l, derive_seed(rc.train.seed, 0x1A7));
}

// ---------------------------------------------------------------------------
// Commands

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline int cmd_synth(const SynthSpec& spec, const fs::path& out_path, const std::optional<fs::path>& test_out,
                     Streams io) {
  const Dataset ds = gen_blobs(spec.seed, spec.blobs);
  save_csv(out_path, ds);
  io.out << "wrote " << ds.size() << " rows (" << ds.num_labeled() << " labeled) to " << out_path.string() << '\n';
  if (test_out) {
    const Dataset test = gen_blobs_test(spec.seed, spec.blobs, spec.test_per_class);
    save_csv(*test_out, test);
    io.out << "wrote " << test.size() << " test rows to " << test_out->string() << '\n';
  }
  return kExitOk;
}

inline int cmd_train(const RunConfig& rc, const fs::path& out_dir, Streams io) {
  const auto data = load_data(rc);
  EmbedNet net0 = initial_net(rc, data.train.dim());
  const Matrix L0 = initial_L(rc);
  fs::create_directories(out_dir);

  TrainOptions opts;
  if (data.val) opts.validation = &*data.val;
  opts.on_round = [&](const RoundSnapshot& s) {
    save_checkpoint(out_dir / ("ckpt_round" + std::to_string(s.round) + ".json"), s.net, s.L);
    io.out << "round " << s.round << ": triplets=" << s.record.n_triplets << " J_end=" << s.record.j_end;
    if (s.record.val_recall1) io.out << " val_R@1=" << *s.record.val_recall1;
    io.out << '\n';
  };
  const auto result = train(data.train, net0, L0, rc.train, opts);

  write_log_jsonl(out_dir / "log.jsonl", result.log);
  save_checkpoint(out_dir / "ckpt_final.json", result.net, result.L);

  // metrics on the test set if present, else validation, else labeled training rows
  Dataset eval_ds;
  if (data.test)
    eval_ds = *data.test;
  else if (data.val)
    eval_ds = *data.val;
  else
    eval_ds = data.train.subset(data.train.labeled_indices());
  const auto labels = require_all_labels(eval_ds, "evaluation set");
  const std::optional<Matrix> proj = rc.project_L ? std::optional<Matrix>(result.L) : std::nullopt;
  const Matrix emb = embed_rows(result.net, eval_ds, proj);
  const auto report = evaluate(emb, labels, rc.ks, rc.eval_seed);
  write_json(out_dir / "metrics.json", to_json(report));
  if (data.test) save_embeddings_csv(out_dir / "embeddings_test.csv", emb, eval_ds.labels);
  io.out << "NMI=" << report.nmi;
  for (const auto& [k, v] : report.recall) io.out << " R@" << k << '=' << v;
  io.out << '\n';
  return kExitOk;
}

inline int cmd_eval(const fs::path& ckpt_path, const fs::path& test_path, const fs::path& out_dir,
                    bool project_L, const std::vector<int>& ks, std::uint64_t seed, Streams io) {
  const auto ck = load_checkpoint(ckpt_path);
  const Dataset test = load_csv(test_path);
  if (project_L && !ck.L) throw Error("checkpoint has no L; cannot use --project-L");
  const auto labels = require_all_labels(test, "test set");
  const Matrix emb = embed_rows(ck.net, test, project_L ? ck.L : std::nullopt);
  const auto report = evaluate(emb, labels, ks, seed);
  fs::create_directories(out_dir);
  write_json(out_dir / "metrics.json", to_json(report));
  save_embeddings_csv(out_dir / "embeddings.csv", emb, test.labels);
  io.out << "NMI=" << report.nmi;
  for (const auto& [k, v] : report.recall) io.out << " R@" << k << '=' << v;
  io.out << '\n';
  return kExitOk;
}

inline int cmd_propagate_debug(const RunConfig& rc, const std::optional<fs::path>& ckpt_path, int round,
                               const fs::path& out_dir, Streams io) {
  const auto data = load_data(rc);
  const EmbedNet net = ckpt_path ? load_checkpoint(*ckpt_path).net : initial_net(rc, data.train.dim());
  const Partition part = sample_partition(data.train, rc.train.n_p, derive_seed(rc.train.seed, static_cast<std::uint64_t>(round)));
  const auto nodes = part.nodes();
  std::vector<Label> node_labels;
  for (const Index v : nodes) node_labels.push_back(data.train.labels[static_cast<std::size_t>(v)]);
  const Matrix emb = embed_rows(net, data.train.subset(nodes), std::nullopt);
  const auto g = build_affinity_graph(emb, node_labels, rc.train.k, rc.train.gamma);
  const auto triplets = mine_triplets(g, rc.train.min_affinity_gap);

  fs::create_directories(out_dir);
  save_matrix_csv(out_dir / "W0.csv", g.W0);
  save_matrix_csv(out_dir / "Q.csv", Matrix(g.knn.Q));
  save_matrix_csv(out_dir / "Wstar.csv", g.Wstar);
  save_matrix_csv(out_dir / "W.csv", g.W);
  save_triplets_csv(out_dir / "triplets.csv", triplets);
  {
    std::ofstream nf(out_dir / "nodes.csv");
    nf << "node,row,label\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nf << i << ',' << nodes[i] << ',';
      if (node_labels[i]) nf << *node_labels[i];
      nf << '\n';
    }
  }
  io.out << "nodes=" << nodes.size() << " triplets=" << triplets.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline std::vector<int> parse_ks(const std::string& s) {
  std::vector<int> ks;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int k = 0;
    try {
      k = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("--ks", "not an integer list: " + s);
    }
    if (pos != item.size() || k < 1) throw ConfigError("--ks", "not a positive integer list: " + s);
    ks.push_back(k);
  }
  if (ks.empty()) throw ConfigError("--ks", "empty list");
  return ks;
}

/// Entry point; `args[0]` is the program name.
inline int run(const std::vector<std::string>& args, Streams io = {}) {
  CLI::App app{"Semi-supervised metric learning on the Grassmann manifold"};
  app.require_subcommand(1);

  SynthSpec synth;
  std::string synth_out, synth_test_out;
  auto* s = app.add_subcommand("synth", "Generate a Gaussian-blob dataset CSV");
  s->add_option("--seed", synth.seed, "RNG seed")->default_val(1);
  s->add_option("--classes", synth.blobs.classes)->default_val(2);
  s->add_option("--per-class", synth.blobs.per_class)->default_val(50);
  s->add_option("--dim", synth.blobs.dim)->default_val(2);
  s->add_option("--spread", synth.blobs.spread, "Per-coordinate noise std")->default_val(1.0);
  s->add_option("--separation", synth.blobs.separation, "Per-coordinate std of class means")->default_val(3.0);
  s->add_option("--label-fraction", synth.blobs.label_fraction)->default_val(0.1);
  s->add_option("--out", synth_out, "Output CSV")->required();
  s->add_option("--test-out", synth_test_out, "Optional fully labeled test CSV");
  s->add_option("--test-per-class", synth.test_per_class, "Test rows per class")->default_val(50);

  std::string train_cfg, train_out;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> rounds_override;
  std::optional<double> lr_override;
  auto* t = app.add_subcommand("train", "Train from a JSON config");
  t->add_option("--config", train_cfg)->required();
  t->add_option("--out", train_out, "Output directory")->required();
  t->add_option("--seed", seed_override, "Override train.seed");
  t->add_option("--rounds", rounds_override, "Override train.rounds");
  t->add_option("--lr", lr_override, "Override train.sgd.lr");

  std::string eval_ckpt, eval_test, eval_out, eval_ks = "1,2,4,8";
  bool eval_project = false;
  std::uint64_t eval_seed = 0;
  auto* e = app.add_subcommand("eval", "Embed a labeled test CSV and report NMI / Recall@K");
  e->add_option("--checkpoint", eval_ckpt)->required();
  e->add_option("--test", eval_test)->required();
  e->add_option("--out", eval_out, "Output directory")->required();
  e->add_flag("--project-L", eval_project, "Evaluate L^T z instead of z");
  e->add_option("--ks", eval_ks, "Comma-separated K values")->default_val("1,2,4,8");
  e->add_option("--seed", eval_seed, "k-means seed")->default_val(0);

  std::string dbg_cfg, dbg_out, dbg_ckpt;
  int dbg_round = 1;
  auto* p = app.add_subcommand("propagate-debug", "Dump W0, Q, W*, W and mined triplets for one partition");
  p->add_option("--config", dbg_cfg)->required();
  p->add_option("--out", dbg_out, "Output directory")->required();
  p->add_option("--checkpoint", dbg_ckpt, "Embed with this network instead of a fresh one");
  p->add_option("--round", dbg_round, "Partition of this training round")->default_val(1)->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    io.err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  }

  try {
    if (s->parsed())
      return cmd_synth(synth, synth_out,
                       synth_test_out.empty() ? std::nullopt : std::optional<fs::path>(synth_test_out), io);
    if (t->parsed()) {
      RunConfig rc = load_config(train_cfg);
      if (seed_override) rc.train.seed = *seed_override;
      if (rounds_override) rc.train.rounds = *rounds_override;
      if (lr_override) rc.train.sgd.lr = *lr_override;
      validate_config(rc);
      return cmd_train(rc, train_out, io);
    }
    if (e->parsed()) {
      const auto ks = parse_ks(eval_ks);
      if (!fs::exists(eval_ckpt)) throw ConfigError("--checkpoint", "no such file: " + eval_ckpt);
      if (!fs::exists(eval_test)) throw ConfigError("--test", "no such file: " + eval_test);
      return cmd_eval(eval_ckpt, eval_test, eval_out, eval_project, ks, eval_seed, io);
    }
    if (p->parsed()) {
      const RunConfig rc = load_config(dbg_cfg);
      return cmd_propagate_debug(rc, dbg_ckpt.empty() ? std::nullopt : std::optional<fs::path>(dbg_ckpt),
                                 dbg_round, dbg_out, io);
    }
  } catch (const ConfigError& ex) {
    io.err << "config error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    io.err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ssdml::cli
