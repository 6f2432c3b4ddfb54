#include <cmath>
#include <random>

#include "doctest.h"
#include "scriptsim/similarity.hpp"
#include "scriptsim/textprep.hpp"
#include "test_util.hpp"

using namespace scriptsim;
using testutil::error_code_of;

namespace {

SparseVector v(std::vector<double> d) { return SparseVector::from_dense(d); }

// Dense reference distances.
double ref_distance(Measure m, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0, dot = 0, aa = 0, bb = 0, mn = 0, mx = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += m == Measure::Euclidean ? (a[j] - b[j]) * (a[j] - b[j]) : std::abs(a[j] - b[j]);
    dot += a[j] * b[j];
    aa += a[j] * a[j];
    bb += b[j] * b[j];
    mn += std::min(a[j], b[j]);
    mx += std::max(a[j], b[j]);
  }
  switch (m) {
    case Measure::Euclidean: return std::sqrt(s);
    case Measure::Manhattan: return s;
    case Measure::Cosine:
      if (aa == 0 || bb == 0) return aa == 0 && bb == 0 ? 0.0 : 1.0;
      return std::clamp(1.0 - dot / std::sqrt(aa * bb), 0.0, 1.0);
    case Measure::Jaccard: return mx == 0 ? 0.0 : 1.0 - mn / mx;
  }
  return 0;
}

DocTermMatrix matrix(const std::vector<std::pair<BookLabel, std::vector<double>>>& rows) {
  DocTermMatrix m;
  std::map<BookLabel, std::size_t> next;
  for (const auto& [book, dense] : rows) {
    m.rows.push_back(SparseVector::from_dense(dense));
    m.row_labels.push_back({book, next[book]++});
  }
  const std::size_t p = rows.empty() ? 0 : rows.front().second.size();
  for (std::size_t j = 0; j < p; ++j) m.vocab.push_back("t" + std::to_string(j));
  return m;
}

}  // namespace

TEST_CASE("euclidean and manhattan examples") {
  CHECK(dist_euclidean(v({0, 3, 4}), v({0, 0, 0})) == 5.0);
  CHECK(dist_euclidean(v({1, 2}), v({4, 6})) == 5.0);
  CHECK(dist_manhattan(v({1, 2}), v({4, 6})) == 7.0);
  CHECK(dist_manhattan(v({0, 0}), v({0, 5})) == 5.0);
}

TEST_CASE("cosine examples") {
  CHECK(cosine_similarity(v({2, 4}), v({1, 2})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(v({1, 0}), v({0, 1})) == 0.0);
  CHECK(cosine_similarity(v({1, 1}), v({1, 0})) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dist_cosine(v({1, 0}), v({0, 1})) == 1.0);
  CHECK(dist_cosine(v({2, 4}), v({1, 2})) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(error_code_of([] { cosine_similarity(v({0, 0}), v({1, 0})); }) == ErrorCode::ZeroVector);
  const auto zz = cosine_distance(v({0, 0}), v({0, 0}));
  CHECK(zz.value == 0.0);
  CHECK(zz.zero_vector);
  const auto zn = cosine_distance(v({0, 0}), v({0, 3}));
  CHECK(zn.value == 1.0);
  CHECK(zn.zero_vector);
  CHECK_FALSE(cosine_distance(v({1, 0}), v({0, 3})).zero_vector);
}

TEST_CASE("jaccard examples") {
  CHECK(dist_jaccard(v({1, 0}), v({0, 1})) == 1.0);
  CHECK(jaccard_similarity(v({1, 2}), v({2, 1})) == 0.5);
  CHECK(jaccard_similarity(v({0, 0}), v({0, 0})) == 1.0);
  CHECK(error_code_of([] { jaccard_similarity(v({-1, 0}), v({1, 0})); }) == ErrorCode::NegativeEntry);
}

TEST_CASE("dimension mismatch") {
  for (Measure m : kAllMeasures) {
    CHECK(error_code_of([&] { distance(m, v({1, 2}), v({1, 2, 3})); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("kernels agree with a dense reference on both sparse and dense paths") {
  std::mt19937_64 gen(77);
  for (std::size_t dim : {std::size_t{5}, std::size_t{40}, std::size_t{200}}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = testutil::random_sparse(gen, dim, 0.3);
      const auto b = testutil::random_sparse(gen, dim, 0.3);
      for (Measure m : kAllMeasures) {
        const double got = distance(m, a, b);
        const double want = ref_distance(m, a.to_dense(), b.to_dense());
        CHECK(testutil::close_rel(got, want, 1e-12));
        CHECK(got == distance(m, b, a));
      }
    }
  }
}

TEST_CASE("parse names") {
  for (Measure m : kAllMeasures) CHECK(parse_measure(to_string(m)) == m);
  for (Aggregator a : kAllAggregators) CHECK(parse_aggregator(to_string(a)) == a);
  CHECK(parse_aggregator("average") == Aggregator::Mean);
  CHECK(error_code_of([] { parse_measure("hamming"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("aggregate") {
  CHECK(aggregate({3, 1, 2}, Aggregator::Median) == 2.0);
  CHECK(aggregate({4, 1, 3, 2}, Aggregator::Median) == 2.5);
  CHECK(aggregate({4, 1, 3, 2}, Aggregator::Mean) == 2.5);
  CHECK(aggregate({4, 1, 3, 2}, Aggregator::Min) == 1.0);
  CHECK(aggregate({4, 1, 3, 2}, Aggregator::Max) == 4.0);
  CHECK(error_code_of([] { aggregate({}, Aggregator::Mean); }) == ErrorCode::EmptyInput);
}

TEST_CASE("within-book matrix") {
  const auto one = matrix({{BookLabel::Proverb, {1, 2}}, {BookLabel::Wisdom, {0, 1}}});
  const auto d1 = within_book_matrix(one, BookLabel::Proverb, Measure::Euclidean);
  CHECK(d1.n == 1);
  CHECK(d1.d == std::vector<double>{0.0});

  const auto three = matrix({{BookLabel::Proverb, {1, 0}}, {BookLabel::Proverb, {0, 1}}, {BookLabel::Proverb, {1, 1}}});
  const auto d = within_book_matrix(three, BookLabel::Proverb, Measure::Euclidean);
  REQUIRE(d.n == 3);
  CHECK(d.at(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(d.at(0, 2) == 1.0);
  CHECK(d.at(1, 2) == 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d.at(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(d.at(i, j) == d.at(j, i));
  }
  CHECK(error_code_of([&] { within_book_matrix(three, BookLabel::Wisdom, Measure::Euclidean); }) ==
        ErrorCode::UnknownBook);
}

TEST_CASE("between-book example") {
  const auto m = matrix({{BookLabel::Proverb, {0, 0}}, {BookLabel::Wisdom, {3, 4}}, {BookLabel::Wisdom, {6, 8}}});
  const std::map<Aggregator, double> want = {
      {Aggregator::Min, 5}, {Aggregator::Max, 10}, {Aggregator::Mean, 7.5}, {Aggregator::Median, 7.5}};
  for (const auto& [agg, value] : want) {
    const auto delta = between_book_matrix(m, Measure::Euclidean, agg);
    REQUIRE(delta.size() == 2);
    CHECK(*delta.at(0, 1) == value);
    CHECK(*delta.at(1, 0) == value);
    CHECK_FALSE(delta.at(0, 0).has_value());  // single-chapter book
    CHECK(*delta.at(1, 1) == 5.0);
  }
  const auto single = matrix({{BookLabel::Proverb, {0, 1}}, {BookLabel::Proverb, {1, 1}}});
  CHECK(error_code_of([&] { between_book_matrix(single, Measure::Euclidean, Aggregator::Min); }) ==
        ErrorCode::TooFewBooks);
}

TEST_CASE("min <= median <= max and mean within range, entrywise") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> book(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<BookLabel, std::vector<double>>> rows;
    for (int i = 0; i < 14; ++i) {
      rows.push_back({kAllBooks[static_cast<std::size_t>(book(gen))], testutil::random_sparse(gen, 12, 0.4).to_dense()});
    }
    const auto m = matrix(rows);
    if (m.books().size() < 2) continue;
    for (Measure meas : kAllMeasures) {
      const auto all = pairwise_distances(m, meas);
      const auto lo = between_book_matrix(all, Aggregator::Min);
      const auto md = between_book_matrix(all, Aggregator::Median);
      const auto mn = between_book_matrix(all, Aggregator::Mean);
      const auto hi = between_book_matrix(all, Aggregator::Max);
      for (std::size_t k = 0; k < lo.delta.size(); ++k) {
        if (!lo.delta[k]) continue;
        CHECK(*lo.delta[k] <= *md.delta[k]);
        CHECK(*md.delta[k] <= *hi.delta[k]);
        CHECK(*lo.delta[k] <= *mn.delta[k] + 1e-12);
        CHECK(*mn.delta[k] <= *hi.delta[k] + 1e-12);
      }
    }
  }
}

TEST_CASE("pairwise matrix is independent of thread count") {
  std::mt19937_64 gen(4);
  std::vector<std::pair<BookLabel, std::vector<double>>> rows;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({kAllBooks[static_cast<std::size_t>(i % 3)], testutil::random_sparse(gen, 90, 0.2).to_dense()});
  }
  rows.push_back({BookLabel::Wisdom, std::vector<double>(90, 0.0)});
  const auto m = matrix(rows);
  for (Measure meas : kAllMeasures) {
    const auto a = pairwise_distances(m, meas, {}, 1);
    const auto b = pairwise_distances(m, meas, {}, 7);
    CHECK(a.d == b.d);
    CHECK(a.zero_vector_pairs == b.zero_vector_pairs);
    CHECK(distance_matrix_csv(a) == distance_matrix_csv(b));
  }
  CHECK(pairwise_distances(m, Measure::Cosine).zero_vector_pairs == 40);
}

TEST_CASE("exports") {
  const auto m = matrix({{BookLabel::Proverb, {0, 0}}, {BookLabel::Wisdom, {3, 4}}});
  const auto delta = between_book_matrix(m, Measure::Euclidean, Aggregator::Median);
  CHECK(book_matrix_csv(delta) == "book,Prv,Wsd\nPrv,NA,5\nWsd,5,NA\n");
  CHECK(book_matrix_jsonl(delta).find("\"value\":null") != std::string::npos);
  const auto d = pairwise_distances(m, Measure::Euclidean);
  CHECK(distance_matrix_csv(d) == "chapter,Prv:0,Wsd:0\nPrv:0,0,5\nWsd:0,5,0\n");
  CHECK(row_name({BookLabel::Upanishad, 3}) == "Upd:3");
}
