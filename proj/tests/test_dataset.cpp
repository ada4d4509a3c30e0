#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ssdml/dataset.hpp"

namespace fs = std::filesystem;
using namespace ssdml;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ssdml_test_dataset";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(LoadCsv, EmptyLabelCellsAreUnlabeled) {
  const auto p = temp_file("three.csv");
  write_text(p, "f0,f1,label\n1.0,2.0,0\n3.0,4.0,\n5.0,6.0,1\n");
  const Dataset ds = load_csv(p);
  EXPECT_EQ(ds.size(), 3);
  EXPECT_EQ(ds.dim(), 2);
  EXPECT_EQ(ds.num_labeled(), 2);
  EXPECT_EQ(ds.labels[0], Label(0));
  EXPECT_FALSE(ds.labels[1].has_value());
  EXPECT_EQ(ds.labels[2], Label(1));
  EXPECT_DOUBLE_EQ(ds.features(1, 0), 3.0);
}

TEST(LoadCsv, MinusOneIsUnlabeled) {
  const auto p = temp_file("minus_one.csv");
  write_text(p, "f0,label\n1,-1\n2,0\n3,1\n");
  const Dataset ds = load_csv(p);
  EXPECT_FALSE(ds.labels[0].has_value());
  EXPECT_EQ(ds.num_labeled(), 2);
}

TEST(LoadCsv, NonNumericCellReportsLine) {
  const auto p = temp_file("bad.csv");
  write_text(p, "f0,f1,label\n1.0,2.0,0\n3.0,abc,1\n");
  try {
    load_csv(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadCsv, WrongCellCountIsParseError) {
  const auto p = temp_file("ragged.csv");
  write_text(p, "f0,f1,label\n1.0,2.0,0\n3.0,1\n");
  EXPECT_THROW(load_csv(p), ParseError);
}

TEST(LoadCsv, ZeroRowsIsError) {
  const auto p = temp_file("empty.csv");
  write_text(p, "f0,f1,label\n");
  EXPECT_THROW(load_csv(p), Error);
}

TEST(LoadCsv, SaveLoadRoundTripIsByteStable) {
  const Dataset ds = gen_blobs(3, 3, 10, 4, 0.7, 0.3);
  const auto a = temp_file("rt_a.csv"), b = temp_file("rt_b.csv");
  save_csv(a, ds);
  const Dataset back = load_csv(a);
  EXPECT_EQ(back.features, ds.features);  // shortest round-trip formatting is exact
  EXPECT_EQ(back.labels, ds.labels);
  save_csv(b, back);
  EXPECT_EQ(read_text(a), read_text(b));
}

TEST(GenBlobs, CountsLabeledPerClass) {
  const Dataset ds = gen_blobs(1, 2, 50, 8, 1.0, 0.1);
  EXPECT_EQ(ds.size(), 100);
  EXPECT_EQ(ds.num_labeled(), 10);
  int c0 = 0, c1 = 0;
  for (const auto& y : ds.labels) {
    if (y == Label(0)) ++c0;
    if (y == Label(1)) ++c1;
  }
  EXPECT_EQ(c0, 5);
  EXPECT_EQ(c1, 5);
}

TEST(GenBlobs, SameSeedIsBitIdentical) {
  const Dataset a = gen_blobs(42, 3, 20, 5, 0.5, 0.2);
  const Dataset b = gen_blobs(42, 3, 20, 5, 0.5, 0.2);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  const Dataset c = gen_blobs(43, 3, 20, 5, 0.5, 0.2);
  EXPECT_NE(a.features, c.features);
}

TEST(GenBlobs, VanishingSpreadCollapsesClasses) {
  const Dataset ds = gen_blobs(5, 3, 10, 6, 1e-12, 0.5);
  double max_within = 0.0, sep_sum = 0.0;
  int sep_n = 0;
  for (Index i = 0; i < ds.size(); ++i)
    for (Index j = i + 1; j < ds.size(); ++j) {
      const double d = (ds.features.row(i) - ds.features.row(j)).norm();
      if (i / 10 == j / 10)
        max_within = std::max(max_within, d);
      else {
        sep_sum += d;
        ++sep_n;
      }
    }
  EXPECT_LT(max_within, 1e-6 * sep_sum / sep_n);
}

TEST(GenBlobs, RejectsBadArguments) {
  EXPECT_THROW(gen_blobs(1, 1, 10, 2, 1.0, 0.5), PreconditionError);
  EXPECT_THROW(gen_blobs(1, 2, 1, 2, 1.0, 0.5), PreconditionError);
  EXPECT_THROW(gen_blobs(1, 2, 10, 2, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(gen_blobs(1, 2, 10, 2, 1.0, 1.5), PreconditionError);
}

TEST(SamplePartition, FullDrawCoversUnlabeledPool) {
  const Dataset ds = gen_blobs(2, 2, 20, 3, 1.0, 0.25);
  const auto part = sample_partition(ds, ds.num_unlabeled(), 11);
  EXPECT_EQ(part.unlabeled_idx, ds.unlabeled_indices());
  EXPECT_EQ(part.labeled_idx, ds.labeled_indices());
  const auto oversized = sample_partition(ds, 10 * ds.num_unlabeled(), 11);
  EXPECT_EQ(static_cast<Index>(oversized.unlabeled_idx.size()), ds.num_unlabeled());
}

TEST(SamplePartition, NinetyOfSixtyThousandScale) {
  // 60k rows with 100 labeled; a 9k partition is requested
  Dataset ds;
  ds.features = Matrix::Zero(60000, 1);
  ds.labels.assign(60000, std::nullopt);
  for (int i = 0; i < 100; ++i) ds.labels[static_cast<std::size_t>(i) * 600] = i % 10;
  const auto part = sample_partition(ds, 9000, 3);
  EXPECT_EQ(part.unlabeled_idx.size(), 9000u);
  EXPECT_EQ(part.labeled_idx.size(), 100u);
}

TEST(SamplePartition, ValidUniqueDisjointForManySeeds) {
  const Dataset ds = gen_blobs(9, 3, 30, 2, 1.0, 0.2);
  const auto labeled = ds.labeled_indices();
  const std::set<Index> labeled_set(labeled.begin(), labeled.end());
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto part = sample_partition(ds, 25, seed);
    const std::set<Index> u(part.unlabeled_idx.begin(), part.unlabeled_idx.end());
    ASSERT_EQ(u.size(), 25u);
    for (const Index i : u) {
      ASSERT_GE(i, 0);
      ASSERT_LT(i, ds.size());
      ASSERT_FALSE(labeled_set.count(i));
      ASSERT_FALSE(ds.labels[static_cast<std::size_t>(i)].has_value());
    }
  }
}

TEST(SamplePartition, InclusionFrequencyIsUniform) {
  // 1000 seeds, each unlabeled index included with p = n_p / N_U
  const Dataset ds = gen_blobs(4, 2, 25, 2, 1.0, 0.2);  // 40 unlabeled
  const auto pool = ds.unlabeled_indices();
  const double n_u = static_cast<double>(pool.size());
  const int n_p = 10, trials = 1000;
  std::map<Index, int> hits;
  for (int s = 0; s < trials; ++s)
    for (const Index i : sample_partition(ds, n_p, static_cast<std::uint64_t>(s)).unlabeled_idx) ++hits[i];
  const double p = n_p / n_u;
  const double sigma = std::sqrt(trials * p * (1.0 - p));
  for (const Index i : pool) EXPECT_NEAR(hits[i], trials * p, 3.0 * sigma) << "index " << i;
}

TEST(SamplePartition, NoUnlabeledIsError) {
  const Dataset ds = gen_blobs(1, 2, 5, 2, 1.0, 1.0);
  EXPECT_THROW(sample_partition(ds, 3, 0), PreconditionError);
}

TEST(ValidationSplit, FifteenPercentOfTwenty) {
  const Dataset ds = gen_blobs(6, 3, 40, 2, 1.0, 0.5);  // 20 labeled per class
  const auto split = validation_split(ds, 0.15, 1);
  std::map<int, int> per_class;
  for (const auto& y : split.val.labels) {
    ASSERT_TRUE(y.has_value());
    ++per_class[*y];
  }
  for (int c = 0; c < 3; ++c) EXPECT_EQ(per_class[c], 3);
}

TEST(ValidationSplit, TinyFractionWithTwoPerClassTakesOne) {
  const Dataset ds = gen_blobs(6, 2, 10, 2, 1.0, 0.2);  // 2 labeled per class
  const auto split = validation_split(ds, 1e-6, 1);
  EXPECT_EQ(split.val.size(), 2);
}

TEST(ValidationSplit, PartitionsLabeledSetAndKeepsUnlabeled) {
  const Dataset ds = gen_blobs(8, 4, 30, 3, 1.0, 0.4);
  const auto split = validation_split(ds, 0.3, 5);
  // rows are identified by their feature vectors (continuous draws are distinct)
  auto key = [](const Dataset& d, Index i) { return std::vector<double>(d.features.row(i).begin(), d.features.row(i).end()); };
  std::set<std::vector<double>> train_l, val_l, orig_l;
  Index train_unlabeled = 0;
  for (Index i = 0; i < split.train.size(); ++i) {
    if (split.train.labels[static_cast<std::size_t>(i)])
      train_l.insert(key(split.train, i));
    else
      ++train_unlabeled;
  }
  for (Index i = 0; i < split.val.size(); ++i) val_l.insert(key(split.val, i));
  for (const Index i : ds.labeled_indices()) orig_l.insert(key(ds, i));

  EXPECT_EQ(train_unlabeled, ds.num_unlabeled());
  std::set<std::vector<double>> uni(train_l);
  uni.insert(val_l.begin(), val_l.end());
  EXPECT_EQ(uni, orig_l);
  std::vector<std::vector<double>> inter;
  std::set_intersection(train_l.begin(), train_l.end(), val_l.begin(), val_l.end(), std::back_inserter(inter));
  EXPECT_TRUE(inter.empty());
}

TEST(ValidationSplit, SingletonClassIsError) {
  Dataset ds;
  ds.features = Matrix::Random(5, 2);
  ds.labels = {0, 0, 1, std::nullopt, 0};
  EXPECT_THROW(validation_split(ds, 0.15, 0), PreconditionError);
}
