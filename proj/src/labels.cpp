#include "scriptsim/labels.hpp"

#include <algorithm>
#include <cctype>

#include "scriptsim/error.hpp"

namespace scriptsim {

namespace {

struct LabelNames {
  std::string_view id;
  std::string_view display;
  std::string_view abbrev;
};

constexpr std::array<LabelNames, kBookCount> kNames = {{
    {"g1", "Buddhism", "Bdd"},
    {"g2", "TaoTeChing", "Tao"},
    {"g3", "Upanishad", "Upd"},
    {"g4", "YogaSutra", "Yoga"},
    {"g5", "Proverb", "Prv"},
    {"g6", "Ecclesiastes", "Ecc"},
    {"g7", "Ecclesiasticus", "Ecs"},
    {"g8", "Wisdom", "Wsd"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view label_id(BookLabel b) noexcept { return kNames[index_of(b)].id; }
std::string_view display_name(BookLabel b) noexcept { return kNames[index_of(b)].display; }
std::string_view abbreviation(BookLabel b) noexcept { return kNames[index_of(b)].abbrev; }

std::optional<BookLabel> parse_book_label(std::string_view text) noexcept {
  for (BookLabel b : kAllBooks) {
    const auto& n = kNames[index_of(b)];
    if (iequals(text, n.id) || iequals(text, n.display) || iequals(text, n.abbrev)) return b;
  }
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyAfterStrip: return "EmptyAfterStrip";
    case ErrorCode::NoChaptersFound: return "NoChaptersFound";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidStopword: return "InvalidStopword";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::UnknownBook: return "UnknownBook";
    case ErrorCode::TooFewBooks: return "TooFewBooks";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::TooFewChapters: return "TooFewChapters";
    case ErrorCode::EmptyTrain: return "EmptyTrain";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidFormat: return "InvalidFormat";
    case ErrorCode::MissingUpstreamArtifact: return "MissingUpstreamArtifact";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace scriptsim
