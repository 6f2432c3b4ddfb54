#include <random>
#include <set>

#include "doctest.h"
#include "scriptsim/textprep.hpp"
#include "test_util.hpp"

using namespace scriptsim;
using testutil::error_code_of;
using Tokens = std::vector<std::string>;

namespace {

TokenizedChapter tc(BookLabel b, std::size_t i, Tokens t) { return TokenizedChapter{b, i, std::move(t)}; }

}  // namespace

TEST_CASE("tokenize examples") {
  const auto en = StopwordSet::english();
  CHECK(tokenize("The LORD, the lord!", en) == Tokens{"lord", "lord"});
  CHECK(tokenize("47:2. And as the fat", en) == Tokens{"fat"});
  CHECK(tokenize("the and of a an", en).empty());
  CHECK(tokenize("", en).empty());
  CHECK(tokenize("well-being isn't caf\xc3\xa9", StopwordSet{}) == Tokens{"well", "being", "isn", "t", "caf"});
}

TEST_CASE("tokens are lowercase letters and never stopwords") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 200);
  auto stops = StopwordSet::english();
  stops.add_extra("thee");
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = len(gen); i > 0; --i) {
      const int b = byte(gen);
      // bias toward letters so real words show up
      s += b < 128 ? static_cast<char>('a' + b % 26) : b < 160 ? static_cast<char>('A' + b % 26)
                                                               : static_cast<char>(b % 2 ? ' ' : b);
    }
    s += " the THEE Thee";
    for (const auto& t : tokenize(s, stops)) {
      CHECK_FALSE(t.empty());
      for (char c : t) CHECK((c >= 'a' && c <= 'z'));
      CHECK_FALSE(stops.contains(t));
    }
  }
}

TEST_CASE("stopword files") {
  const auto dir = testutil::temp_dir("stopwords");
  testutil::write_file(dir / "ok.txt", "# archaic forms\nThee\n\n  thou  \nye # trailing comment\n");
  StopwordSet s;
  s.add_file(dir / "ok.txt");
  CHECK(s.contains("thee"));
  CHECK(s.contains("thou"));
  CHECK(s.contains("ye"));
  CHECK_FALSE(s.contains("the"));

  testutil::write_file(dir / "bad.txt", "good\ntwo words\n");
  CHECK(error_code_of([&] { s.add_file(dir / "bad.txt"); }) == ErrorCode::InvalidStopword);
  CHECK(error_code_of([&] { s.add_file(dir / "absent.txt"); }) == ErrorCode::MissingFile);

  StopwordSet archaic;
  archaic.add_file(std::filesystem::path(SCRIPTSIM_FIXTURES) / ".." / ".." / "data" / "stopwords" / "archaic.txt");
  CHECK(archaic.contains("thou"));
  CHECK(archaic.contains("unto"));
}

TEST_CASE("bundled english list") {
  const auto& words = bundled_english_stopwords();
  CHECK(words.size() > 100);
  CHECK(std::set<std::string_view>(words.begin(), words.end()).size() == words.size());
  const auto en = StopwordSet::english();
  for (auto w : words) CHECK(en.contains(w));
}

TEST_CASE("vocabulary") {
  const std::vector<TokenizedChapter> ch = {tc(BookLabel::Proverb, 0, {"a", "b"}),
                                            tc(BookLabel::Proverb, 1, {"b", "c"})};
  CHECK(vocabulary(ch, 1) == Tokens{"a", "b", "c"});
  CHECK(vocabulary(ch, 2) == Tokens{"b"});
  CHECK(vocabulary(ch, 0) == Tokens{"a", "b", "c"});
  CHECK(error_code_of([&] { vocabulary(ch, 3); }) == ErrorCode::EmptyVocabulary);
  CHECK(error_code_of([&] { vocabulary({}, 1); }) == ErrorCode::EmptyVocabulary);
}

TEST_CASE("vocabulary is sorted, unique and respects min_df") {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> word(0, 25);
  std::uniform_int_distribution<int> len(0, 15);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenizedChapter> ch;
    for (int i = 0; i < 6; ++i) {
      Tokens t;
      for (int j = len(gen); j > 0; --j) t.push_back(std::string(1, static_cast<char>('a' + word(gen))));
      ch.push_back(tc(BookLabel::Wisdom, static_cast<std::size_t>(i), t));
    }
    for (std::size_t min_df = 1; min_df <= 3; ++min_df) {
      Tokens expect;
      for (char c = 'a'; c <= 'z'; ++c) {
        std::size_t df = 0;
        for (const auto& x : ch) df += std::count(x.tokens.begin(), x.tokens.end(), std::string(1, c)) > 0;
        if (df >= min_df) expect.push_back(std::string(1, c));
      }
      if (expect.empty()) {
        CHECK(error_code_of([&] { vocabulary(ch, min_df); }) == ErrorCode::EmptyVocabulary);
      } else {
        CHECK(vocabulary(ch, min_df) == expect);
      }
    }
  }
}

TEST_CASE("short chapters are dropped") {
  std::vector<TokenizedChapter> ch = {tc(BookLabel::Proverb, 0, {"a", "b", "c", "d", "e"}),
                                      tc(BookLabel::Proverb, 1, {"a"}),
                                      tc(BookLabel::Proverb, 2, {"a", "b", "c", "d", "e", "f"})};
  std::vector<TokenizedChapter> dropped;
  const auto kept = drop_short_chapters(ch, 5, &dropped);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].index == 0);
  CHECK(kept[1].index == 2);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0].index == 1);
  CHECK(drop_short_chapters(ch, 0).size() == 3);
}

TEST_CASE("clean_and_tokenize keeps book and index") {
  const Chapter c{BookLabel::Ecclesiastes, 4, "Vanity of vanities, all is vanity."};
  const auto t = clean_and_tokenize(c, StopwordSet::english());
  CHECK(t.book == BookLabel::Ecclesiastes);
  CHECK(t.index == 4);
  CHECK(t.tokens == Tokens{"vanity", "vanities", "vanity"});
}
