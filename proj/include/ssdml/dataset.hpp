#pragma once

// Semi-supervised datasets: CSV IO, synthetic Gaussian blobs, partitions of
// the unlabeled pool, and stratified validation splits.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ssdml/common.hpp"
#include "ssdml/random.hpp"

namespace ssdml {

using Label = std::optional<int>;

struct Dataset {
  Matrix features;            // N x D, one row per example
  std::vector<Label> labels;  // length N; nullopt = unlabeled
  std::string name;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }

  Index num_labeled() const {
    return static_cast<Index>(std::count_if(labels.begin(), labels.end(),
                                            [](const Label& y) { return y.has_value(); }));
  }
  Index num_unlabeled() const { return size() - num_labeled(); }

  /// C = 1 + largest label present; 0 when nothing is labeled.
  int num_classes() const {
    int c = 0;
    for (const auto& y : labels)
      if (y) c = std::max(c, *y + 1);
    return c;
  }

  std::vector<Index> labeled_indices() const { return indices_where(true); }
  std::vector<Index> unlabeled_indices() const { return indices_where(false); }

  /// Throws PreconditionError when an invariant does not hold.
  void validate() const {
    require(static_cast<Index>(labels.size()) == features.rows(),
            "dataset: label count does not match row count");
    require(features.allFinite(), "dataset: non-finite feature value");
    for (const auto& y : labels)
      require(!y || *y >= 0, "dataset: negative class label");
    const int c = num_classes();
    require(c == 0 || c >= 2, "dataset: labeled examples must span at least 2 classes");
  }

  /// Rows `idx` in the given order.
  Dataset subset(const std::vector<Index>& idx) const {
    Dataset out;
    out.name = name;
    out.features.resize(static_cast<Index>(idx.size()), dim());
    out.labels.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.features.row(static_cast<Index>(r)) = features.row(idx[r]);
      out.labels.push_back(labels[static_cast<std::size_t>(idx[r])]);
    }
    return out;
  }

 private:
  std::vector<Index> indices_where(bool labeled) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i].has_value() == labeled) out.push_back(static_cast<Index>(i));
    return out;
  }
};

struct Partition {
  std::vector<Index> labeled_idx;
  std::vector<Index> unlabeled_idx;

  /// Graph node order: every labeled row first, then the sampled unlabeled rows.
  std::vector<Index> nodes() const {
    std::vector<Index> out(labeled_idx);
    out.insert(out.end(), unlabeled_idx.begin(), unlabeled_idx.end());
    return out;
  }
  Index size() const { return static_cast<Index>(labeled_idx.size() + unlabeled_idx.size()); }
};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Reads a headered CSV. Every column other than `label_column` is a
/// feature, in file order. Empty label cells and -1 mean "unlabeled".
inline Dataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column = "label") {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error("empty dataset: " + path.string());
  ++line_no;

  const auto header = detail::split_csv(line);
  std::optional<std::size_t> label_col;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (detail::trim(header[c]) == label_column) label_col = c;
  const std::size_t n_cols = header.size();
  const std::size_t n_feat = n_cols - (label_col ? 1 : 0);
  if (n_feat == 0) throw ParseError("no feature columns", line_no);

  std::vector<double> values;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != n_cols)
      throw ParseError("expected " + std::to_string(n_cols) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    Label y;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (label_col && c == *label_col) {
        const auto cell = detail::trim(cells[c]);
        if (cell.empty()) continue;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size() || v < -1)
          throw ParseError("bad label '" + std::string(cell) + "'", line_no);
        if (v >= 0) y = v;
        continue;
      }
      const auto v = detail::parse_double(cells[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError("bad feature value '" + std::string(detail::trim(cells[c])) +
                             "' in column " + std::to_string(c),
                         line_no);
      values.push_back(*v);
    }
    labels.push_back(y);
  }
  if (labels.empty()) throw Error("empty dataset: " + path.string());

  Dataset ds;
  ds.name = path.stem().string();
  const auto n = static_cast<Index>(labels.size());
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Index>(n_feat));
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

/// Header f0..f{D-1},label; unlabeled rows get an empty label cell.
inline void save_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Index c = 0; c < ds.dim(); ++c) out << 'f' << c << ',';
  out << "label\n";
  for (Index r = 0; r < ds.size(); ++r) {
    for (Index c = 0; c < ds.dim(); ++c) out << detail::format_double(ds.features(r, c)) << ',';
    if (const auto& y = ds.labels[static_cast<std::size_t>(r)]) out << *y;
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic data

struct BlobSpec {
  int classes = 2;
  int per_class = 50;
  int dim = 2;
  double spread = 1.0;          // per-coordinate standard deviation
  double label_fraction = 0.1;  // labeled share of every class
  double separation = 3.0;      // per-coordinate std of the class means
};

/// Class means, one row per class, drawn as separation * N(0, I).
inline Matrix blob_means(std::uint64_t seed, int classes, int dim, double separation) {
  Rng rng(derive_seed(seed, 0xB10B));
  Matrix means(classes, dim);
  for (Index c = 0; c < classes; ++c)
    for (Index j = 0; j < dim; ++j) means(c, j) = separation * rng.normal();
  return means;
}

/// Isotropic samples around `means`, class-major row order. The first
/// ceil(label_fraction * per_class) rows of each class carry labels.
inline Dataset sample_blobs(const Matrix& means, int per_class, double spread,
                            double label_fraction, std::uint64_t seed) {
  require(means.rows() >= 2, "gen_blobs: classes must be >= 2");
  require(per_class >= 2, "gen_blobs: per_class must be >= 2");
  require(label_fraction > 0.0 && label_fraction <= 1.0,
          "gen_blobs: label_fraction must lie in (0, 1]");
  require(spread >= 0.0, "gen_blobs: spread must be >= 0");

  const auto classes = means.rows();
  const auto n_labeled = static_cast<int>(std::ceil(label_fraction * per_class - 1e-9));
  Rng rng(derive_seed(seed, 0x5A3D));
  Dataset ds;
  ds.name = "blobs";
  ds.features.resize(classes * per_class, means.cols());
  ds.labels.reserve(static_cast<std::size_t>(classes * per_class));
  for (Index c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const Index r = c * per_class + i;
      for (Index j = 0; j < means.cols(); ++j) ds.features(r, j) = means(c, j) + spread * rng.normal();
      ds.labels.push_back(i < n_labeled ? Label(static_cast<int>(c)) : std::nullopt);
    }
  }
  return ds;
}

inline Dataset gen_blobs(std::uint64_t seed, const BlobSpec& spec) {
  require(spec.dim >= 1, "gen_blobs: dim must be >= 1");
  require(spec.classes >= 2, "gen_blobs: classes must be >= 2");
  return sample_blobs(blob_means(seed, spec.classes, spec.dim, spec.separation), spec.per_class,
                      spec.spread, spec.label_fraction, seed);
}

inline Dataset gen_blobs(std::uint64_t seed, int classes, int per_class, int dim, double spread,
                         double label_fraction) {
  BlobSpec spec;
  spec.classes = classes;
  spec.per_class = per_class;
  spec.dim = dim;
  spec.spread = spread;
  spec.label_fraction = label_fraction;
  return gen_blobs(seed, spec);
}

/// Fully labeled held-out sample drawn around the same means as gen_blobs(seed, spec).
inline Dataset gen_blobs_test(std::uint64_t seed, const BlobSpec& spec, int per_class) {
  Dataset ds = sample_blobs(blob_means(seed, spec.classes, spec.dim, spec.separation), per_class,
                            spec.spread, 1.0, derive_seed(seed, 0x7E57));
  ds.name = "blobs_test";
  return ds;
}

// ---------------------------------------------------------------------------
// Partitions and splits

/// All labeled rows plus min(n_p, N_U) unlabeled rows drawn uniformly
/// without replacement. Sampled indices are returned in ascending order.
inline Partition sample_partition(const Dataset& ds, Index n_p, std::uint64_t seed) {
  require(n_p >= 1, "sample_partition: n_p must be >= 1");
  auto pool = ds.unlabeled_indices();
  require(!pool.empty(), "sample_partition: dataset has no unlabeled examples");

  const auto take = std::min<std::size_t>(static_cast<std::size_t>(n_p), pool.size());
  Rng rng(derive_seed(seed, 0x9A27));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return Partition{ds.labeled_indices(), std::move(pool)};
}

struct TrainValSplit {
  Dataset train;
  Dataset val;
};

/// Per class, ceil(fraction * n_c) labeled rows (capped at n_c - 1) go to
/// validation. Unlabeled rows stay in train. Both halves keep file order.
inline TrainValSplit validation_split(const Dataset& ds, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "validation_split: fraction must lie in (0, 1)");
  const int classes = ds.num_classes();
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    if (const auto& y = ds.labels[i]) by_class[static_cast<std::size_t>(*y)].push_back(static_cast<Index>(i));

  Rng rng(derive_seed(seed, 0x5B17));
  std::vector<char> to_val(ds.labels.size(), 0);
  for (int c = 0; c < classes; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    require(members.size() >= 2, "validation_split: class " + std::to_string(c) +
                                     " has fewer than 2 labeled examples");
    const auto n_c = static_cast<double>(members.size());
    auto n_val = static_cast<std::size_t>(std::ceil(fraction * n_c - 1e-9));
    n_val = std::clamp<std::size_t>(n_val, 1, members.size() - 1);
    rng.shuffle(std::span(members));
    for (std::size_t i = 0; i < n_val; ++i) to_val[static_cast<std::size_t>(members[i])] = 1;
  }

  std::vector<Index> train_idx, val_idx;
  for (std::size_t i = 0; i < to_val.size(); ++i)
    (to_val[i] ? val_idx : train_idx).push_back(static_cast<Index>(i));
  TrainValSplit out{ds.subset(train_idx), ds.subset(val_idx)};
  out.train.name = ds.name + "_train";
  out.val.name = ds.name + "_val";
  return out;
}

}  // namespace ssdml
