#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "scriptsim/dtm.hpp"
#include "scriptsim/textprep.hpp"
#include "test_util.hpp"

using namespace scriptsim;
using testutil::error_code_of;
using Tokens = std::vector<std::string>;

namespace {

TokenizedChapter tc(BookLabel b, std::size_t i, Tokens t) { return TokenizedChapter{b, i, std::move(t)}; }

std::vector<TokenizedChapter> random_chapters(std::mt19937_64& gen, std::size_t n, std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> word(0, alphabet - 1);
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> book(0, static_cast<int>(kBookCount) - 1);
  std::vector<TokenizedChapter> out;
  for (std::size_t i = 0; i < n; ++i) {
    Tokens t;
    for (int j = len(gen); j > 0; --j) t.push_back("w" + std::to_string(word(gen)));
    out.push_back(tc(kAllBooks[static_cast<std::size_t>(book(gen))], i, t));
  }
  return out;
}

}  // namespace

TEST_CASE("raw frequency row") {
  const auto dtm = build_dtm({tc(BookLabel::Proverb, 0, {"a", "b", "a"})}, {"a", "b", "c"}, Weighting::RawFrequency);
  REQUIRE(dtm.n() == 1);
  CHECK(dtm.p() == 3);
  CHECK(dtm.rows[0].to_dense() == std::vector<double>{2, 1, 0});
  CHECK(dtm.rows[0].nnz() == 2);
  CHECK(dtm.row_labels[0] == RowLabel{BookLabel::Proverb, 0});
}

TEST_CASE("log relative frequency row") {
  const auto dtm =
      build_dtm({tc(BookLabel::Proverb, 0, {"a", "b", "a"})}, {"a", "b", "c"}, Weighting::LogRelativeFrequency);
  const auto row = dtm.rows[0].to_dense();
  // hand values: ln(5/3) and ln(4/3)
  CHECK(row[0] == doctest::Approx(0.5108256237659907).epsilon(1e-15));
  CHECK(row[1] == doctest::Approx(0.28768207245178085).epsilon(1e-15));
  CHECK(row[2] == 0.0);
  CHECK(std::abs(row[0] - 0.5108) < 1e-4);
  CHECK(std::abs(row[1] - 0.2877) < 1e-4);
}

TEST_CASE("empty chapter gives a zero row") {
  for (auto w : {Weighting::RawFrequency, Weighting::LogRelativeFrequency}) {
    const auto dtm = build_dtm({tc(BookLabel::Proverb, 0, {}), tc(BookLabel::Proverb, 1, {"zzz"})}, {"a", "b"}, w);
    CHECK(dtm.rows[0].nnz() == 0);
    CHECK(dtm.rows[1].nnz() == 0);
    CHECK(dtm.rows[0].to_dense() == std::vector<double>{0, 0});
  }
  CHECK(error_code_of([&] { build_dtm({tc(BookLabel::Proverb, 0, {"a"})}, {}, Weighting::RawFrequency); }) ==
        ErrorCode::EmptyVocabulary);
}

TEST_CASE("sparsity") {
  const auto one = build_dtm({tc(BookLabel::Proverb, 0, {"a", "b", "a"})}, {"a", "b", "c"}, Weighting::RawFrequency);
  CHECK(sparsity(one) == doctest::Approx(1.0 / 3.0));
  const auto zeros =
      build_dtm({tc(BookLabel::Proverb, 0, {}), tc(BookLabel::Proverb, 1, {})}, {"a", "b"}, Weighting::RawFrequency);
  CHECK(sparsity(zeros) == 1.0);
  CHECK(error_code_of([&] { sparsity(DocTermMatrix{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("row sums, bounds and order on random chapters") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    auto chapters = random_chapters(gen, 12, 30);
    chapters.push_back(tc(BookLabel::Wisdom, 99, {"w1"}));  // guarantees a non-empty vocabulary
    const auto vocab = vocabulary(chapters, 2);
    const auto raw = build_dtm(chapters, vocab, Weighting::RawFrequency);
    const auto logrel = build_dtm(chapters, vocab, Weighting::LogRelativeFrequency);
    REQUIRE(raw.n() == chapters.size());
    for (std::size_t i = 0; i < chapters.size(); ++i) {
      CHECK(raw.row_labels[i] == RowLabel{chapters[i].book, chapters[i].index});
      std::size_t in_vocab = 0;
      for (const auto& t : chapters[i].tokens) in_vocab += std::binary_search(vocab.begin(), vocab.end(), t);
      double sum = 0;
      for (double v : raw.rows[i].value) sum += v;
      CHECK(sum == static_cast<double>(in_vocab));
      CHECK(std::is_sorted(raw.rows[i].index.begin(), raw.rows[i].index.end()));
      CHECK(logrel.rows[i].index == raw.rows[i].index);
      for (std::size_t k = 0; k < logrel.rows[i].nnz(); ++k) {
        const double v = logrel.rows[i].value[k];
        CHECK(v > 0.0);
        CHECK(v <= std::log(2.0));
        // independent evaluation of ln(1 + f/N)
        CHECK(v == doctest::Approx(std::log(1.0 + raw.rows[i].value[k] / sum)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("export round trip is exact") {
  std::mt19937_64 gen(3);
  const auto dir = testutil::temp_dir("dtm_io");
  for (auto w : {Weighting::RawFrequency, Weighting::LogRelativeFrequency}) {
    auto chapters = random_chapters(gen, 15, 50);
    chapters.push_back(tc(BookLabel::Buddhism, 0, {"w0", "w1"}));
    const auto vocab = vocabulary(chapters);
    const auto dtm = build_dtm(chapters, vocab, w);
    write_dtm(dtm, dir, "x");
    const auto back = read_dtm(dir, "x");
    CHECK(back.vocab == dtm.vocab);
    CHECK(back.row_labels == dtm.row_labels);
    CHECK(back.weighting == dtm.weighting);
    REQUIRE(back.rows.size() == dtm.rows.size());
    for (std::size_t i = 0; i < dtm.rows.size(); ++i) CHECK(back.rows[i] == dtm.rows[i]);
  }
  CHECK(error_code_of([&] { read_dtm(dir, "missing"); }) == ErrorCode::MissingUpstreamArtifact);
  testutil::write_file(dir / "bad.mtx", "not a matrix\n");
  testutil::write_file(dir / "bad.vocab.txt", "a\n");
  testutil::write_file(dir / "bad.rows.csv", "book,chapter\ng1,0\n");
  CHECK(error_code_of([&] { read_dtm(dir, "bad"); }) == ErrorCode::InvalidFormat);
}

TEST_CASE("rows_of and books") {
  const auto dtm = build_dtm({tc(BookLabel::Wisdom, 0, {"a"}), tc(BookLabel::Proverb, 0, {"a"}),
                              tc(BookLabel::Wisdom, 1, {"a"})},
                             {"a"}, Weighting::RawFrequency);
  CHECK(dtm.rows_of(BookLabel::Wisdom) == std::vector<std::size_t>{0, 2});
  CHECK(dtm.rows_of(BookLabel::Buddhism).empty());
  CHECK(dtm.books() == std::vector<BookLabel>{BookLabel::Proverb, BookLabel::Wisdom});
}
