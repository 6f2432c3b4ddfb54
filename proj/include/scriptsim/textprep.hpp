#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scriptsim/corpus.hpp"

namespace scriptsim {

// Stopwords removed during tokenization. `base` is the bundled English
// list, `extra` holds user-supplied words (archaic forms and the like).
class StopwordSet {
 public:
  StopwordSet() = default;
  StopwordSet(std::set<std::string> base, std::set<std::string> extra);

  // The bundled English list with no extras.
  static StopwordSet english();

  // Adds every entry of a stopword file to `extra`: one token per line,
  // '#' starts a comment, blank lines ignored, entries lowercased.
  // Throws InvalidStopword for entries with internal whitespace.
  void add_file(const std::filesystem::path& path);
  void add_extra(std::string_view word);

  bool contains(std::string_view token) const;
  const std::set<std::string, std::less<>>& base() const { return base_; }
  const std::set<std::string, std::less<>>& extra() const { return extra_; }

 private:
  std::set<std::string, std::less<>> base_;
  std::set<std::string, std::less<>> extra_;
};

// The bundled English list, one lowercase word per element.
const std::vector<std::string_view>& bundled_english_stopwords();

struct TokenizedChapter {
  BookLabel book{};
  std::size_t index = 0;
  std::vector<std::string> tokens;
};

// Lowercases ASCII letters and treats every other byte (digits, verse
// markers, punctuation, hyphens, apostrophes, non-ASCII) as a separator,
// then drops stopwords. Surviving tokens keep their order.
std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stops);

TokenizedChapter clean_and_tokenize(const Chapter& chapter, const StopwordSet& stops);

// Removes chapters with fewer than `min_tokens` tokens. Dropped chapters are
// returned through `dropped` (may be null) so the caller can warn.
std::vector<TokenizedChapter> drop_short_chapters(std::vector<TokenizedChapter> chapters,
                                                  std::size_t min_tokens,
                                                  std::vector<TokenizedChapter>* dropped = nullptr);

// Terms occurring in at least `min_df` distinct chapters, sorted. A min_df of
// zero behaves like one. Throws EmptyVocabulary when no term qualifies.
std::vector<std::string> vocabulary(const std::vector<TokenizedChapter>& chapters,
                                    std::size_t min_df = 1);

}  // namespace scriptsim
