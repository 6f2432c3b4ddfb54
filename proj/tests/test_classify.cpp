#include <random>
#include <set>

#include "doctest.h"
#include "scriptsim/classify.hpp"
#include "test_util.hpp"

using namespace scriptsim;
using testutil::error_code_of;

namespace {

LabeledRows subset(const testutil::Cloud& c, const std::vector<std::size_t>& idx) {
  LabeledRows out;
  for (auto i : idx) {
    out.rows.push_back(c.rows[i]);
    out.labels.push_back(c.labels[i]);
  }
  return out;
}

double accuracy(const std::vector<BookLabel>& pred, const std::vector<BookLabel>& actual) {
  return confusion(pred, actual).accuracy;
}

}  // namespace

TEST_CASE("unstratified split sizes") {
  const std::vector<BookLabel> labels(10, BookLabel::Proverb);
  const auto s = split(labels, {0.7, 3, false});
  CHECK(s.train.size() == 7);
  CHECK(s.test.size() == 3);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));

  const auto again = split(labels, {0.7, 3, false});
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
}

TEST_CASE("stratified split keeps class proportions") {
  std::vector<BookLabel> labels(90, BookLabel::Proverb);
  labels.insert(labels.end(), 10, BookLabel::Wisdom);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = split(labels, {0.7, seed, true});
    const auto wisdom_train = std::count_if(s.train.begin(), s.train.end(), [&](auto i) {
      return labels[i] == BookLabel::Wisdom;
    });
    CHECK(wisdom_train >= 6);
    CHECK(wisdom_train <= 8);
    CHECK(s.train.size() + s.test.size() == 100);
  }
  CHECK(error_code_of([&] { split({BookLabel::Proverb, BookLabel::Wisdom, BookLabel::Wisdom}, {0.7, 1, true}); }) ==
        ErrorCode::TooFewChapters);
  CHECK(error_code_of([&] { split(labels, {1.0, 1, true}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("knn with k=1 memorizes the training set") {
  const auto c = testutil::two_clouds(1, 60, 4, 1.0);  // heavy overlap
  LabeledRows train{c.rows, c.labels};
  CHECK(knn_predict(train, c.rows, {1, Measure::Euclidean}) == c.labels);
  CHECK(knn_predict(train, c.rows, {1, Measure::Manhattan}, 3) == c.labels);
  CHECK(error_code_of([&] { knn_predict({}, c.rows, {}); }) == ErrorCode::EmptyTrain);
}

TEST_CASE("knn vote ties go to the smallest label id") {
  LabeledRows train;
  train.rows = {SparseVector::from_dense({1.0}), SparseVector::from_dense({3.0})};
  train.labels = {BookLabel::Wisdom, BookLabel::Buddhism};
  const auto pred = knn_predict(train, {SparseVector::from_dense({2.0})}, {2, Measure::Euclidean});
  CHECK(pred[0] == BookLabel::Buddhism);
}

TEST_CASE("svm separates linearly separable data on the training set") {
  const auto c = testutil::two_clouds(2, 100, 5, 12.0);
  LabeledRows train{c.rows, c.labels};
  CHECK(accuracy(svm_predict(train, c.rows, {}, 7), c.labels) == 1.0);
  CHECK(svm_predict(train, c.rows, {}, 7) == svm_predict(train, c.rows, {}, 7));
}

TEST_CASE("forest on a constant feature predicts the majority class") {
  LabeledRows train;
  for (int i = 0; i < 9; ++i) {
    train.rows.push_back(SparseVector::from_dense({2.0, 0.0}));
    train.labels.push_back(i < 5 ? BookLabel::Ecclesiastes : BookLabel::Proverb);
  }
  const auto pred = forest_predict(train, {SparseVector::from_dense({2.0, 0.0}), SparseVector::from_dense({9.0, 1.0})},
                                   {10, 0, 0, false, 2}, 4);
  CHECK(pred[0] == BookLabel::Ecclesiastes);
  CHECK(pred[1] == BookLabel::Ecclesiastes);
}

TEST_CASE("single tree fits training data exactly") {
  const auto c = testutil::two_clouds(3, 80, 3, 2.0);
  LabeledRows train{c.rows, c.labels};
  DecisionTree t;
  t.fit(train, {});
  for (std::size_t i = 0; i < c.rows.size(); ++i) CHECK(t.predict(c.rows[i]) == c.labels[i]);
  CHECK(t.node_count() % 2 == 1);

  DecisionTree stump;
  stump.fit(train, {1, 0, 2, 0});
  CHECK(stump.depth() == 1);
  CHECK(stump.node_count() == 3);
}

TEST_CASE("one-tree forest without bootstrap equals the single tree") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = testutil::two_clouds(10 + seed, 120, 6, 3.0);
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < c.rows.size(); ++i) (i % 4 == 0 ? te : tr).push_back(i);
    const auto train = subset(c, tr);
    const auto test = subset(c, te);

    ForestParams fp{1, 0, 6, false, 2};
    RandomForest f;
    f.fit(train, fp, seed);
    DecisionTree t;
    t.fit(train, {0, 0, 2, seed});
    for (const auto& x : test.rows) CHECK(f.predict(x) == t.predict(x));
  }
}

TEST_CASE("two clouds 10 sigma apart") {
  const auto c = testutil::two_clouds(42, 200, 5, 10.0);
  const auto s = split(c.labels, {0.7, 5, true});
  const auto train = subset(c, s.train);
  const auto test = subset(c, s.test);
  CHECK(accuracy(knn_predict(train, test.rows, {}), test.labels) >= 0.95);
  CHECK(accuracy(svm_predict(train, test.rows, {}, 1), test.labels) >= 0.95);
  CHECK(accuracy(forest_predict(train, test.rows, {}, 1), test.labels) >= 0.95);
}

TEST_CASE("forest is independent of thread count") {
  const auto c = testutil::two_clouds(8, 100, 8, 2.0);
  LabeledRows train{c.rows, c.labels};
  ForestParams fp;
  fp.n_trees = 30;
  CHECK(forest_predict(train, c.rows, fp, 9, 1) == forest_predict(train, c.rows, fp, 9, 6));
}

TEST_CASE("confusion") {
  using B = BookLabel;
  const auto cm = confusion({B::Proverb, B::Wisdom, B::Wisdom}, {B::Proverb, B::Proverb, B::Wisdom});
  CHECK(cm.total == 3);
  CHECK(cm.trace == 2);
  CHECK(cm.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(cm.counts[index_of(B::Wisdom)][index_of(B::Proverb)] == 1);
  CHECK(error_code_of([] { confusion({B::Proverb}, {}); }) == ErrorCode::LengthMismatch);
  CHECK(confusion({}, {}).accuracy == 0.0);

  const std::string csv = confusion_csv(cm);
  CHECK(csv.rfind("predicted\\actual,Buddhism,Ecclesiastes,Ecclesiasticus,Proverb,TaoTeChing,Upanishad,Wisdom,YogaSutra\n", 0) == 0);
  CHECK(csv.find("Wisdom,0,0,0,1,0,0,1,0\n") != std::string::npos);
}

TEST_CASE("classifier kind names") {
  for (auto k : {ClassifierKind::Knn, ClassifierKind::SvmLinear, ClassifierKind::RandomForest}) {
    CHECK(parse_classifier_kind(to_string(k)) == k);
  }
  CHECK(error_code_of([] { parse_classifier_kind("nb"); }) == ErrorCode::InvalidArgument);
}
