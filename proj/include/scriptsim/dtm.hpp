#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scriptsim/textprep.hpp"

namespace scriptsim {

// Non-negative sparse vector of fixed dimension; indices strictly increasing,
// only nonzero values stored.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }

  // Builds from a dense vector, dropping zeros.
  static SparseVector from_dense(const std::vector<double>& dense);
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

enum class Weighting {
  RawFrequency,          // X_ij = f_ij
  LogRelativeFrequency,  // X_ij = ln(1 + f_ij / N_i), N_i the in-vocab token count of row i
};

std::string_view to_string(Weighting w) noexcept;
Weighting parse_weighting(std::string_view text);

struct RowLabel {
  BookLabel book{};
  std::size_t chapter = 0;

  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

struct DocTermMatrix {
  std::vector<std::string> vocab;
  std::vector<SparseVector> rows;
  std::vector<RowLabel> row_labels;
  Weighting weighting = Weighting::RawFrequency;

  std::size_t n() const { return rows.size(); }
  std::size_t p() const { return vocab.size(); }
  std::size_t nnz() const;

  // Row indices belonging to `book`, ascending.
  std::vector<std::size_t> rows_of(BookLabel book) const;
  // Books with at least one row, in label-id order.
  std::vector<BookLabel> books() const;
};

// Builds X over `vocab` (sorted, as produced by vocabulary()). Tokens not in
// the vocabulary are ignored; empty rows are all-zero. Throws EmptyVocabulary.
DocTermMatrix build_dtm(const std::vector<TokenizedChapter>& chapters,
                        const std::vector<std::string>& vocab, Weighting weighting);

// Fraction of zero entries. Throws InvalidArgument when n*p == 0.
double sparsity(const DocTermMatrix& dtm);

// Writes `<stem>.mtx` (MatrixMarket coordinate), `<stem>.vocab.txt` (one term
// per line) and `<stem>.rows.csv` (book,chapter). Values are written in the
// shortest form that round-trips exactly.
void write_dtm(const DocTermMatrix& dtm, const std::filesystem::path& dir,
               std::string_view stem = "dtm");
// Inverse of write_dtm. Throws MissingUpstreamArtifact if a file is absent and
// InvalidFormat on malformed content.
DocTermMatrix read_dtm(const std::filesystem::path& dir, std::string_view stem = "dtm");

}  // namespace scriptsim
