#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace scriptsim {

// The eight books of the corpus, in label-id order g1..g8.
enum class BookLabel : std::uint8_t {
  Buddhism = 0,
  TaoTeChing,
  Upanishad,
  YogaSutra,
  Proverb,
  Ecclesiastes,
  Ecclesiasticus,
  Wisdom,
};

inline constexpr std::size_t kBookCount = 8;

inline constexpr std::array<BookLabel, kBookCount> kAllBooks = {
    BookLabel::Buddhism, BookLabel::TaoTeChing,   BookLabel::Upanishad,      BookLabel::YogaSutra,
    BookLabel::Proverb,  BookLabel::Ecclesiastes, BookLabel::Ecclesiasticus, BookLabel::Wisdom,
};

constexpr std::size_t index_of(BookLabel b) noexcept { return static_cast<std::size_t>(b); }

// "g1".."g8"
std::string_view label_id(BookLabel b) noexcept;
// "Buddhism", "TaoTeChing", ...
std::string_view display_name(BookLabel b) noexcept;
// Node names used by cluster graphs: "Bdd", "Tao", "Upd", ...
std::string_view abbreviation(BookLabel b) noexcept;

// Accepts the id ("g3"), the display name ("Upanishad") or the abbreviation
// ("Upd"); matching is case-insensitive.
std::optional<BookLabel> parse_book_label(std::string_view text) noexcept;

}  // namespace scriptsim
