#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scriptsim/dtm.hpp"
#include "scriptsim/similarity.hpp"

namespace scriptsim {

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Seeded train/test partition of rows with the given labels. Stratified
// splits take round(fraction * n_b) rows of each book b into training,
// clamped so both sides get at least one; TooFewChapters when a book has
// fewer than two rows. Unstratified splits take round(fraction * n).
Split split(const std::vector<BookLabel>& labels, const SplitSpec& spec);

enum class ClassifierKind { Knn, SvmLinear, RandomForest };
std::string_view to_string(ClassifierKind k) noexcept;
ClassifierKind parse_classifier_kind(std::string_view text);

struct KnnParams {
  std::size_t k = 5;
  Measure measure = Measure::Euclidean;
};

// One-vs-rest linear SVM trained with Pegasos-style stochastic subgradient
// steps (step 1/(lambda t)) on the hinge loss. The bias is a constant
// feature appended to every row and is regularized with the weights.
struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 50;
  bool standardize = true;  // z-score columns with training statistics
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;          // 0 = unbounded
  std::size_t features_per_split = 0; // 0 = ceil(sqrt(p))
  bool bootstrap = true;
  std::size_t min_samples_split = 2;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Knn;
  KnnParams knn;
  SvmParams svm;
  ForestParams forest;
  std::uint64_t seed = 0;
};

// Labeled training or test rows.
struct LabeledRows {
  std::vector<SparseVector> rows;
  std::vector<BookLabel> labels;
};

LabeledRows select_rows(const DocTermMatrix& dtm, const std::vector<std::size_t>& idx);

// Individual classifiers; each throws EmptyTrain on an empty training set.

// Majority vote of the k nearest training rows. Equal distances keep the
// lower training index; equal votes go to the smallest label id.
std::vector<BookLabel> knn_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                   const KnnParams& params, unsigned threads = 1);

std::vector<BookLabel> svm_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                   const SvmParams& params, std::uint64_t seed);

// CART classification tree with the Gini criterion. At each node candidate
// features are visited in a seeded random order until `features_per_split`
// non-constant ones have been scored (continuing past that count when all
// visited features are constant). The best split minimizes the weighted
// child impurity; ties go to the lower feature index, then the lower
// threshold. Leaves predict their majority label (ties: smallest id).
class DecisionTree {
 public:
  struct Options {
    std::size_t max_depth = 0;           // 0 = unbounded
    std::size_t features_per_split = 0;  // 0 = all features
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
  };

  // `sample` selects training rows (with repetition for bootstraps); empty
  // means every row once.
  void fit(const LabeledRows& train, const Options& opts, const std::vector<std::size_t>& sample = {});
  BookLabel predict(const SparseVector& x) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const;

 private:
  struct Node {
    std::int64_t feature = -1;  // -1 marks a leaf
    double threshold = 0;       // go left when x[feature] <= threshold
    std::size_t left = 0;
    std::size_t right = 0;
    BookLabel label{};
    std::size_t depth = 0;
  };
  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  void fit(const LabeledRows& train, const ForestParams& params, std::uint64_t seed,
           unsigned threads = 1);
  BookLabel predict(const SparseVector& x) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

std::vector<BookLabel> forest_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                      const ForestParams& params, std::uint64_t seed,
                                      unsigned threads = 1);

std::vector<BookLabel> train_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                     const ClassifierSpec& spec, unsigned threads = 1);

// counts[predicted][actual], indexed by label id.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kBookCount>, kBookCount> counts{};
  std::size_t total = 0;
  std::size_t trace = 0;
  double accuracy = 0;  // trace / total; 0 when total is 0
};

// Throws LengthMismatch when the lists differ in length.
ConfusionMatrix confusion(const std::vector<BookLabel>& predicted, const std::vector<BookLabel>& actual);

struct ClassifierResult {
  ClassifierSpec spec;
  ConfusionMatrix confusion;
  std::vector<BookLabel> predicted;
};

struct BenchmarkReport {
  SplitSpec split_spec;
  Split split;
  std::vector<ClassifierResult> results;
};

// Trains and evaluates every spec on one shared split.
BenchmarkReport benchmark(const DocTermMatrix& dtm, const SplitSpec& split_spec,
                          const std::vector<ClassifierSpec>& specs, unsigned threads = 1);

// Confusion table as CSV: rows predicted, columns actual, both ordered by
// display name.
std::string confusion_csv(const ConfusionMatrix& cm);
std::string benchmark_json(const BenchmarkReport& report, const DocTermMatrix& dtm);

}  // namespace scriptsim
