#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scriptsim/labels.hpp"

namespace scriptsim {

enum class SegKind {
  NumberedChapter,    // a heading line carrying a chapter number starts each chapter
  VersePrefix,        // "N:M." verse markers, grouped by N
  HeadingRegex,       // any line matching the pattern starts a chapter
  PreSplitDirectory,  // one file per chapter, filename order
};

std::string_view to_string(SegKind kind) noexcept;
SegKind parse_seg_kind(std::string_view text);

// How a book's body text is cut into chapters. An empty pattern selects the
// kind's default (see default_pattern).
struct SegRule {
  SegKind kind = SegKind::NumberedChapter;
  std::string pattern;

  // Pattern actually used for matching.
  std::string effective_pattern() const;
  static std::string default_pattern(SegKind kind);
};

struct RawBook {
  BookLabel label{};
  std::filesystem::path source_path;
  std::string text;
  SegRule rule;
  // Only filled for pre-split directories: one stripped text per file, in
  // filename order. `text` then holds their newline-joined concatenation.
  std::vector<std::string> parts;
};

struct Chapter {
  BookLabel book{};
  std::size_t index = 0;
  std::string raw_text;
};

struct Corpus {
  std::vector<Chapter> chapters;
  std::map<BookLabel, std::size_t> per_book_counts;
};

// Removes the Project Gutenberg header and footer when both "*** START OF"
// and "*** END OF" sentinel lines are present; returns the text between
// them. Anything else is returned unchanged. Idempotent.
std::string strip_gutenberg_boilerplate(std::string_view text);

// Reads a book (or, for PreSplitDirectory, a directory of chapter files).
// Throws MissingFile when the path does not exist and EmptyAfterStrip when
// nothing but whitespace survives boilerplate removal.
RawBook load_book(const std::filesystem::path& path, BookLabel label, const SegRule& rule);

// Cuts a book into chapters ordered by appearance. Throws NoChaptersFound if
// the rule matches nothing and InvalidRule if the pattern does not compile.
std::vector<Chapter> segment(const RawBook& book);

// Segments every book and concatenates the chapters in the given book
// order. Throws EmptyCorpus for an empty list and DuplicateLabel when a
// label repeats.
Corpus build_corpus(const std::vector<RawBook>& books);

}  // namespace scriptsim
