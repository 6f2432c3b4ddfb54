#include "scriptsim/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "scriptsim/error.hpp"
#include "text_util.hpp"

namespace scriptsim {

namespace fs = std::filesystem;

std::string_view to_string(SegKind kind) noexcept {
  switch (kind) {
    case SegKind::NumberedChapter: return "numbered-chapter";
    case SegKind::VersePrefix: return "verse-prefix";
    case SegKind::HeadingRegex: return "heading-regex";
    case SegKind::PreSplitDirectory: return "pre-split-directory";
  }
  return "numbered-chapter";
}

SegKind parse_seg_kind(std::string_view text) {
  for (SegKind k : {SegKind::NumberedChapter, SegKind::VersePrefix, SegKind::HeadingRegex,
                    SegKind::PreSplitDirectory}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidRule, "unknown segmentation rule kind '" + std::string(text) + "'");
}

std::string SegRule::default_pattern(SegKind kind) {
  switch (kind) {
    case SegKind::NumberedChapter:
      return R"(^\s*(?:chapter|ch\.)?\s*([0-9]+|[ivxlcdm]+)\s*[.:]?\s*$)";
    case SegKind::VersePrefix:
      return R"((\d+):(\d+)\.)";
    case SegKind::HeadingRegex:
      return {};
    case SegKind::PreSplitDirectory:
      return R"(^[^.].*)";
  }
  return {};
}

std::string SegRule::effective_pattern() const {
  return pattern.empty() ? default_pattern(kind) : pattern;
}

namespace {

std::regex compile(const SegRule& rule) {
  const std::string pat = rule.effective_pattern();
  if (pat.empty()) {
    throw Error(ErrorCode::InvalidRule,
                std::string(to_string(rule.kind)) + " rule requires a pattern");
  }
  try {
    return std::regex(pat, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidRule, "pattern '" + pat + "' does not compile: " + e.what());
  }
}

std::string read_whole_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Returns [begin, end) of the first line at or after `from` containing `needle`.
std::optional<std::pair<std::size_t, std::size_t>> find_line(std::string_view text,
                                                              std::string_view needle,
                                                              std::size_t from) {
  const std::size_t hit = text.find(needle, from);
  if (hit == std::string_view::npos) return std::nullopt;
  const std::size_t nl_before = text.rfind('\n', hit);
  const std::size_t begin = nl_before == std::string_view::npos ? 0 : nl_before + 1;
  std::size_t end = text.find('\n', hit);
  end = end == std::string_view::npos ? text.size() : end + 1;
  return std::make_pair(begin, end);
}

// Chapters in heading-delimited text: each matching line opens a chapter,
// the heading itself is dropped, preamble before the first heading too.
std::vector<Chapter> segment_by_headings(const RawBook& book) {
  const std::regex heading = compile(book.rule);
  std::vector<std::string> bodies;
  bool open = false;
  for (std::string_view line : detail::split_lines(book.text)) {
    const std::string l(detail::trim(line));
    if (std::regex_search(l, heading)) {
      bodies.emplace_back();
      open = true;
      continue;
    }
    if (!open) continue;
    auto& body = bodies.back();
    if (!body.empty()) body += '\n';
    body.append(line);
  }
  std::vector<Chapter> out;
  for (auto& b : bodies) {
    std::string t(detail::trim(b));
    if (t.empty()) continue;
    out.push_back(Chapter{book.label, out.size(), std::move(t)});
  }
  return out;
}

struct VerseMarker {
  std::size_t begin;
  std::size_t end;
  long chapter;
  long verse;
};

// Paragraphs are separated by lines containing only whitespace.
std::vector<std::string_view> paragraphs(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = std::string_view::npos;
  std::size_t last_end = 0;
  std::size_t pos = 0;
  for (std::string_view line : detail::split_lines(text)) {
    const std::size_t line_begin = static_cast<std::size_t>(line.data() - text.data());
    pos = line_begin + line.size();
    if (detail::trim(line).empty()) {
      if (start != std::string_view::npos) {
        out.push_back(text.substr(start, last_end - start));
        start = std::string_view::npos;
      }
      continue;
    }
    if (start == std::string_view::npos) start = line_begin;
    last_end = pos;
  }
  if (start != std::string_view::npos) out.push_back(text.substr(start, last_end - start));
  return out;
}

// Verses "N:M." grouped by N. A chapter's first verse is often printed
// without a marker, after a heading paragraph; when the next marker opens a
// new chapter at verse > 1, the first paragraph of the gap stays with the
// current verse, the last paragraph opens the next chapter and anything in
// between (headings, summaries) is dropped.
std::vector<Chapter> segment_by_verses(const RawBook& book) {
  const std::regex marker_re = compile(book.rule);
  const std::string_view text = book.text;

  std::vector<VerseMarker> markers;
  for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), marker_re);
       it != std::cregex_iterator(); ++it) {
    const auto& m = *it;
    if (m.size() < 2 || !m[1].matched) {
      throw Error(ErrorCode::InvalidRule, "verse-prefix pattern needs a chapter capture group");
    }
    VerseMarker vm{};
    vm.begin = static_cast<std::size_t>(m.position(0));
    vm.end = vm.begin + static_cast<std::size_t>(m.length(0));
    vm.chapter = std::stol(m[1].str());
    vm.verse = m.size() > 2 && m[2].matched ? std::stol(m[2].str()) : 0;
    markers.push_back(vm);
  }
  if (markers.empty()) return {};

  std::vector<long> order;
  std::map<long, std::vector<std::string>> verses;
  auto add = [&](long chapter, std::string_view body) {
    std::string t = detail::collapse_whitespace(body);
    if (t.empty()) return;
    if (!verses.count(chapter)) order.push_back(chapter);
    verses[chapter].push_back(std::move(t));
  };

  const long first_chapter = markers.front().chapter;
  if (markers.front().verse > 1) {
    const auto paras = paragraphs(text.substr(0, markers.front().begin));
    if (!paras.empty()) add(first_chapter, paras.back());
  }

  for (std::size_t i = 0; i < markers.size(); ++i) {
    const auto& cur = markers[i];
    const std::size_t body_end = i + 1 < markers.size() ? markers[i + 1].begin : text.size();
    const std::string_view body = text.substr(cur.end, body_end - cur.end);
    const bool opens_unmarked =
        i + 1 < markers.size() && markers[i + 1].chapter != cur.chapter && markers[i + 1].verse > 1;
    if (!opens_unmarked) {
      add(cur.chapter, body);
      continue;
    }
    const auto paras = paragraphs(body);
    if (paras.empty()) continue;
    add(cur.chapter, paras.front());
    if (paras.size() > 1) add(markers[i + 1].chapter, paras.back());
  }

  std::vector<Chapter> out;
  for (long n : order) {
    std::string joined;
    for (const auto& v : verses[n]) {
      if (!joined.empty()) joined += ' ';
      joined += v;
    }
    out.push_back(Chapter{book.label, out.size(), std::move(joined)});
  }
  return out;
}

std::vector<Chapter> segment_presplit(const RawBook& book) {
  std::vector<Chapter> out;
  for (const auto& part : book.parts) {
    std::string t(detail::trim(part));
    if (t.empty()) continue;
    out.push_back(Chapter{book.label, out.size(), std::move(t)});
  }
  return out;
}

}  // namespace

std::string strip_gutenberg_boilerplate(std::string_view text) {
  const auto start = find_line(text, "*** START OF", 0);
  if (!start) return std::string(text);
  const auto end = find_line(text, "*** END OF", start->second);
  if (!end) return std::string(text);
  return std::string(text.substr(start->second, end->first - start->second));
}

RawBook load_book(const fs::path& path, BookLabel label, const SegRule& rule) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::MissingFile, path.string() + " does not exist");

  RawBook book;
  book.label = label;
  book.source_path = path;
  book.rule = rule;

  if (rule.kind == SegKind::PreSplitDirectory) {
    if (!fs::is_directory(path)) {
      throw Error(ErrorCode::InvalidRule, path.string() + " is not a directory");
    }
    const std::regex name_filter = compile(rule);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      if (!std::regex_search(entry.path().filename().string(), name_filter)) continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    for (const auto& f : files) {
      book.parts.push_back(strip_gutenberg_boilerplate(read_whole_file(f)));
      if (!book.text.empty()) book.text += '\n';
      book.text += book.parts.back();
    }
  } else {
    if (fs::is_directory(path)) {
      throw Error(ErrorCode::InvalidRule,
                  path.string() + " is a directory; use the pre-split-directory rule");
    }
    book.text = strip_gutenberg_boilerplate(read_whole_file(path));
  }

  if (detail::trim(book.text).empty()) {
    throw Error(ErrorCode::EmptyAfterStrip, path.string() + " has no text outside boilerplate");
  }
  return book;
}

std::vector<Chapter> segment(const RawBook& book) {
  std::vector<Chapter> chapters;
  switch (book.rule.kind) {
    case SegKind::NumberedChapter:
    case SegKind::HeadingRegex:
      chapters = segment_by_headings(book);
      break;
    case SegKind::VersePrefix:
      chapters = segment_by_verses(book);
      break;
    case SegKind::PreSplitDirectory:
      chapters = segment_presplit(book);
      break;
  }
  if (chapters.empty()) {
    throw Error(ErrorCode::NoChaptersFound,
                std::string(display_name(book.label)) + ": rule " +
                    std::string(to_string(book.rule.kind)) + " matched nothing in " +
                    book.source_path.string());
  }
  return chapters;
}

Corpus build_corpus(const std::vector<RawBook>& books) {
  if (books.empty()) throw Error(ErrorCode::EmptyCorpus, "no books given");
  std::set<BookLabel> seen;
  for (const auto& b : books) {
    if (!seen.insert(b.label).second) {
      throw Error(ErrorCode::DuplicateLabel,
                  std::string(display_name(b.label)) + " appears more than once");
    }
  }
  Corpus corpus;
  for (const auto& b : books) {
    auto chapters = segment(b);
    corpus.per_book_counts[b.label] = chapters.size();
    for (auto& c : chapters) corpus.chapters.push_back(std::move(c));
  }
  return corpus;
}

}  // namespace scriptsim
