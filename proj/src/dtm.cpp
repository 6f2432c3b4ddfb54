#include "scriptsim/dtm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "scriptsim/error.hpp"
#include "scriptsim/format.hpp"
#include "text_util.hpp"

namespace scriptsim {

namespace fs = std::filesystem;

SparseVector SparseVector::from_dense(const std::vector<double>& dense) {
  SparseVector v;
  v.dim = dense.size();
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0.0) {
      v.index.push_back(static_cast<std::uint32_t>(j));
      v.value.push_back(dense[j]);
    }
  }
  return v;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> d(dim, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) d[index[k]] = value[k];
  return d;
}

std::string_view to_string(Weighting w) noexcept {
  return w == Weighting::RawFrequency ? "raw-frequency" : "log-relative-frequency";
}

Weighting parse_weighting(std::string_view text) {
  if (text == "raw-frequency") return Weighting::RawFrequency;
  if (text == "log-relative-frequency") return Weighting::LogRelativeFrequency;
  throw Error(ErrorCode::InvalidArgument, "unknown weighting '" + std::string(text) + "'");
}

std::size_t DocTermMatrix::nnz() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.nnz();
  return total;
}

std::vector<std::size_t> DocTermMatrix::rows_of(BookLabel book) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    if (row_labels[i].book == book) out.push_back(i);
  }
  return out;
}

std::vector<BookLabel> DocTermMatrix::books() const {
  std::vector<BookLabel> out;
  for (BookLabel b : kAllBooks) {
    if (std::any_of(row_labels.begin(), row_labels.end(),
                    [b](const RowLabel& l) { return l.book == b; })) {
      out.push_back(b);
    }
  }
  return out;
}

DocTermMatrix build_dtm(const std::vector<TokenizedChapter>& chapters,
                        const std::vector<std::string>& vocab, Weighting weighting) {
  if (vocab.empty()) throw Error(ErrorCode::EmptyVocabulary, "vocabulary is empty");
  if (!std::is_sorted(vocab.begin(), vocab.end())) {
    throw Error(ErrorCode::InvalidArgument, "vocabulary must be sorted");
  }

  DocTermMatrix dtm;
  dtm.vocab = vocab;
  dtm.weighting = weighting;
  dtm.rows.reserve(chapters.size());

  for (const auto& ch : chapters) {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (const auto& tok : ch.tokens) {
      auto it = std::lower_bound(vocab.begin(), vocab.end(), tok);
      if (it == vocab.end() || *it != tok) continue;
      ++counts[static_cast<std::uint32_t>(it - vocab.begin())];
    }
    std::uint64_t total = 0;
    for (const auto& [j, f] : counts) total += f;

    SparseVector row;
    row.dim = vocab.size();
    for (const auto& [j, f] : counts) {
      row.index.push_back(j);
      if (weighting == Weighting::RawFrequency) {
        row.value.push_back(static_cast<double>(f));
      } else {
        row.value.push_back(std::log1p(static_cast<double>(f) / static_cast<double>(total)));
      }
    }
    dtm.rows.push_back(std::move(row));
    dtm.row_labels.push_back(RowLabel{ch.book, ch.index});
  }
  return dtm;
}

double sparsity(const DocTermMatrix& dtm) {
  const double cells = static_cast<double>(dtm.n()) * static_cast<double>(dtm.p());
  if (cells == 0) throw Error(ErrorCode::InvalidArgument, "sparsity of an empty matrix");
  std::size_t nonzero = 0;
  for (const auto& r : dtm.rows) {
    nonzero += static_cast<std::size_t>(
        std::count_if(r.value.begin(), r.value.end(), [](double v) { return v != 0.0; }));
  }
  return (cells - static_cast<double>(nonzero)) / cells;
}

void write_dtm(const DocTermMatrix& dtm, const fs::path& dir, std::string_view stem) {
  const std::string s(stem);
  std::ostringstream mtx;
  mtx << "%%MatrixMarket matrix coordinate real general\n";
  mtx << "% weighting: " << to_string(dtm.weighting) << "\n";
  mtx << dtm.n() << ' ' << dtm.p() << ' ' << dtm.nnz() << "\n";
  for (std::size_t i = 0; i < dtm.n(); ++i) {
    const auto& r = dtm.rows[i];
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      mtx << (i + 1) << ' ' << (r.index[k] + 1) << ' ' << format_double(r.value[k]) << "\n";
    }
  }
  write_text_file(dir / (s + ".mtx"), mtx.str());

  std::string vocab;
  for (const auto& t : dtm.vocab) vocab += t + "\n";
  write_text_file(dir / (s + ".vocab.txt"), vocab);

  std::ostringstream rows;
  rows << "book,chapter\n";
  for (const auto& l : dtm.row_labels) rows << label_id(l.book) << ',' << l.chapter << "\n";
  write_text_file(dir / (s + ".rows.csv"), rows.str());
}

namespace {

[[noreturn]] void bad_format(const fs::path& p, const std::string& what) {
  throw Error(ErrorCode::InvalidFormat, p.string() + ": " + what);
}

std::size_t parse_size(const fs::path& p, std::string_view s) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) bad_format(p, "bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

DocTermMatrix read_dtm(const fs::path& dir, std::string_view stem) {
  const std::string s(stem);
  const fs::path mtx_path = dir / (s + ".mtx");
  const fs::path vocab_path = dir / (s + ".vocab.txt");
  const fs::path rows_path = dir / (s + ".rows.csv");
  for (const auto& p : {mtx_path, vocab_path, rows_path}) {
    if (!fs::exists(p)) throw Error(ErrorCode::MissingUpstreamArtifact, p.string() + " not found");
  }

  DocTermMatrix dtm;
  const std::string vocab_text = read_text_file(vocab_path);
  for (auto line : detail::split_lines(vocab_text)) {
    if (!line.empty()) dtm.vocab.emplace_back(line);
  }

  const std::string rows_text = read_text_file(rows_path);
  const auto row_lines = detail::split_lines(rows_text);
  for (std::size_t k = 1; k < row_lines.size(); ++k) {
    const auto line = row_lines[k];
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) bad_format(rows_path, "missing comma");
    const auto book = parse_book_label(line.substr(0, comma));
    if (!book) bad_format(rows_path, "unknown book '" + std::string(line.substr(0, comma)) + "'");
    dtm.row_labels.push_back(RowLabel{*book, parse_size(rows_path, line.substr(comma + 1))});
  }

  const std::string mtx_text = read_text_file(mtx_path);
  const auto lines = detail::split_lines(mtx_text);
  std::size_t k = 0;
  if (lines.empty() || lines[0].rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
    bad_format(mtx_path, "missing MatrixMarket banner");
  }
  for (; k < lines.size() && (lines[k].empty() || lines[k][0] == '%'); ++k) {
    constexpr std::string_view tag = "% weighting: ";
    if (lines[k].rfind(tag, 0) == 0) dtm.weighting = parse_weighting(lines[k].substr(tag.size()));
  }
  if (k == lines.size()) bad_format(mtx_path, "missing size line");

  auto fields = [&](std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      std::size_t end = line.find(' ', pos);
      if (end == std::string_view::npos) end = line.size();
      if (end > pos) f.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return f;
  };

  const auto header = fields(lines[k++]);
  if (header.size() != 3) bad_format(mtx_path, "size line needs 3 fields");
  const std::size_t n = parse_size(mtx_path, header[0]);
  const std::size_t p = parse_size(mtx_path, header[1]);
  const std::size_t nnz = parse_size(mtx_path, header[2]);
  if (p != dtm.vocab.size()) bad_format(mtx_path, "column count differs from vocabulary size");
  if (n != dtm.row_labels.size()) bad_format(mtx_path, "row count differs from row labels");

  dtm.rows.assign(n, SparseVector{p, {}, {}});
  std::size_t seen = 0;
  for (; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = fields(lines[k]);
    if (f.size() != 3) bad_format(mtx_path, "entry needs 3 fields");
    const std::size_t i = parse_size(mtx_path, f[0]);
    const std::size_t j = parse_size(mtx_path, f[1]);
    if (i == 0 || i > n || j == 0 || j > p) bad_format(mtx_path, "entry index out of range");
    auto& row = dtm.rows[i - 1];
    if (!row.index.empty() && row.index.back() >= j - 1) bad_format(mtx_path, "entries not sorted");
    row.index.push_back(static_cast<std::uint32_t>(j - 1));
    row.value.push_back(parse_double(f[2]));
    ++seen;
  }
  if (seen != nnz) bad_format(mtx_path, "entry count differs from header");
  return dtm;
}

}  // namespace scriptsim
