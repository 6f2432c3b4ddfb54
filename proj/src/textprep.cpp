#include "scriptsim/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "scriptsim/error.hpp"
#include "text_util.hpp"

namespace scriptsim {

namespace {

std::string normalize_entry(std::string_view raw) {
  const std::string_view t = detail::trim(raw);
  if (std::any_of(t.begin(), t.end(), detail::is_space)) {
    throw Error(ErrorCode::InvalidStopword, "stopword '" + std::string(t) + "' contains whitespace");
  }
  std::string out(t);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

StopwordSet::StopwordSet(std::set<std::string> base, std::set<std::string> extra) {
  for (const auto& w : base) {
    auto n = normalize_entry(w);
    if (!n.empty()) base_.insert(std::move(n));
  }
  for (const auto& w : extra) add_extra(w);
}

StopwordSet StopwordSet::english() {
  StopwordSet s;
  for (std::string_view w : bundled_english_stopwords()) s.base_.emplace(w);
  return s;
}

void StopwordSet::add_extra(std::string_view word) {
  auto n = normalize_entry(word);
  if (!n.empty()) extra_.insert(std::move(n));
}

void StopwordSet::add_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open stopword file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    add_extra(line);
  }
}

bool StopwordSet::contains(std::string_view token) const {
  return base_.find(token) != base_.end() || extra_.find(token) != extra_.end();
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stops) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stops.contains(cur)) tokens.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      cur += static_cast<char>(c - 'A' + 'a');
    } else if (c >= 'a' && c <= 'z') {
      cur += static_cast<char>(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TokenizedChapter clean_and_tokenize(const Chapter& chapter, const StopwordSet& stops) {
  return TokenizedChapter{chapter.book, chapter.index, tokenize(chapter.raw_text, stops)};
}

std::vector<TokenizedChapter> drop_short_chapters(std::vector<TokenizedChapter> chapters,
                                                  std::size_t min_tokens,
                                                  std::vector<TokenizedChapter>* dropped) {
  std::vector<TokenizedChapter> kept;
  kept.reserve(chapters.size());
  for (auto& c : chapters) {
    if (c.tokens.size() >= min_tokens) {
      kept.push_back(std::move(c));
    } else if (dropped != nullptr) {
      dropped->push_back(std::move(c));
    }
  }
  return kept;
}

std::vector<std::string> vocabulary(const std::vector<TokenizedChapter>& chapters,
                                    std::size_t min_df) {
  if (chapters.empty()) throw Error(ErrorCode::EmptyVocabulary, "no chapters");
  min_df = std::max<std::size_t>(min_df, 1);

  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& c : chapters) {
    std::vector<std::string_view> uniq(c.tokens.begin(), c.tokens.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto t : uniq) {
      auto it = df.find(t);
      if (it == df.end()) {
        df.emplace(std::string(t), 1);
      } else {
        ++it->second;
      }
    }
  }

  std::vector<std::string> vocab;
  for (const auto& [term, count] : df) {
    if (count >= min_df) vocab.push_back(term);
  }
  if (vocab.empty()) {
    throw Error(ErrorCode::EmptyVocabulary,
                "no term occurs in at least " + std::to_string(min_df) + " chapters");
  }
  return vocab;
}

}  // namespace scriptsim
