#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptsim/dtm.hpp"

namespace scriptsim {

enum class Measure { Euclidean, Manhattan, Cosine, Jaccard };
enum class Aggregator { Min, Max, Mean, Median };

std::string_view to_string(Measure m) noexcept;
std::string_view to_string(Aggregator a) noexcept;
Measure parse_measure(std::string_view text);
Aggregator parse_aggregator(std::string_view text);

inline constexpr Measure kAllMeasures[] = {Measure::Euclidean, Measure::Manhattan, Measure::Cosine,
                                           Measure::Jaccard};
inline constexpr Aggregator kAllAggregators[] = {Aggregator::Min, Aggregator::Max, Aggregator::Mean,
                                                 Aggregator::Median};

// Distance kernels. All throw DimensionMismatch when the dimensions differ.
// Below 64 dimensions the kernels scatter into dense buffers; above, they
// merge the sorted index lists. Both paths add the same nonzero terms in
// increasing index order and agree bit for bit.

double dist_euclidean(const SparseVector& a, const SparseVector& b);
double dist_manhattan(const SparseVector& a, const SparseVector& b);

// a.b / (|a||b|). Throws ZeroVector when either input is all-zero.
double cosine_similarity(const SparseVector& a, const SparseVector& b);

struct CosineDistance {
  double value = 0;
  bool zero_vector = false;  // policy value was substituted
};

// 1 - cosine_similarity, clamped to [0, 1]. With a zero vector the
// similarity is undefined: the distance is 0 for two zero vectors, 1 for a
// zero and a nonzero vector, and the result is flagged.
CosineDistance cosine_distance(const SparseVector& a, const SparseVector& b);
double dist_cosine(const SparseVector& a, const SparseVector& b);

// Weighted (Ruzicka) Jaccard: sum of minima over sum of maxima.
// Two all-zero vectors have similarity 1. Throws NegativeEntry.
double jaccard_similarity(const SparseVector& a, const SparseVector& b);
double dist_jaccard(const SparseVector& a, const SparseVector& b);

double distance(Measure m, const SparseVector& a, const SparseVector& b);

// Symmetric matrix of chapter distances with a zero diagonal.
struct DistanceMatrix {
  Measure measure = Measure::Euclidean;
  std::vector<RowLabel> labels;
  std::size_t n = 0;
  std::vector<double> d;  // row-major n*n
  std::size_t zero_vector_pairs = 0;  // cosine pairs that used the zero-vector policy

  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

// All pairs of the given rows (all rows when `rows` is empty). Each cell is
// computed independently so the result does not depend on `threads`.
DistanceMatrix pairwise_distances(const DocTermMatrix& dtm, Measure measure,
                                  const std::vector<std::size_t>& rows = {}, unsigned threads = 1);

// D_X for one book. Throws UnknownBook if the book has no rows.
DistanceMatrix within_book_matrix(const DocTermMatrix& dtm, BookLabel book, Measure measure,
                                  unsigned threads = 1);

// Aggregate of a list of distances. Median of an even count is the mean of
// the two middle values. Throws EmptyInput for an empty list.
double aggregate(std::vector<double> values, Aggregator agg);

// Delta: book-by-book aggregate distances. Off-diagonal cells aggregate all
// cross pairs; diagonal cells aggregate distinct unordered within-book pairs
// and are missing (nullopt) for single-chapter books.
struct BookDistanceMatrix {
  Measure measure = Measure::Euclidean;
  Aggregator aggregator = Aggregator::Median;
  std::vector<BookLabel> books;
  std::vector<std::optional<double>> delta;  // row-major books.size()^2

  std::size_t size() const { return books.size(); }
  const std::optional<double>& at(std::size_t a, std::size_t b) const {
    return delta[a * books.size() + b];
  }
};

// Throws TooFewBooks when fewer than two books are present.
BookDistanceMatrix between_book_matrix(const DocTermMatrix& dtm, Measure measure, Aggregator agg,
                                       unsigned threads = 1);
// Same, from a precomputed all-rows matrix (avoids recomputing per aggregator).
BookDistanceMatrix between_book_matrix(const DistanceMatrix& all, Aggregator agg);

// Exports. CSV has a header row and a label column; JSON lines carry one
// {"row","col","value"} record per cell (value null when missing).
std::string distance_matrix_csv(const DistanceMatrix& m);
std::string distance_matrix_jsonl(const DistanceMatrix& m);
std::string book_matrix_csv(const BookDistanceMatrix& m);
std::string book_matrix_jsonl(const BookDistanceMatrix& m);

// "Upd:3" style label for a chapter row.
std::string row_name(const RowLabel& l);

}  // namespace scriptsim
