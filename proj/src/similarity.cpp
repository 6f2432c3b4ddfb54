#include "scriptsim/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "scriptsim/error.hpp"
#include "scriptsim/format.hpp"
#include "scriptsim/parallel.hpp"

namespace scriptsim {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::Euclidean: return "euclidean";
    case Measure::Manhattan: return "manhattan";
    case Measure::Cosine: return "cosine";
    case Measure::Jaccard: return "jaccard";
  }
  return "euclidean";
}

std::string_view to_string(Aggregator a) noexcept {
  switch (a) {
    case Aggregator::Min: return "min";
    case Aggregator::Max: return "max";
    case Aggregator::Mean: return "mean";
    case Aggregator::Median: return "median";
  }
  return "median";
}

Measure parse_measure(std::string_view text) {
  for (Measure m : kAllMeasures) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(text) + "'");
}

Aggregator parse_aggregator(std::string_view text) {
  for (Aggregator a : kAllAggregators) {
    if (text == to_string(a)) return a;
  }
  if (text == "average") return Aggregator::Mean;
  throw Error(ErrorCode::InvalidArgument, "unknown aggregator '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kDenseLimit = 64;

void check_dims(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  }
}

// Calls f(x_j, y_j) for every coordinate where either vector is nonzero
// (sparse path) or for every coordinate (dense path), in increasing j.
template <class F>
void for_each_pair(const SparseVector& a, const SparseVector& b, F&& f) {
  check_dims(a, b);
  if (a.dim < kDenseLimit) {
    std::array<double, kDenseLimit> x{};
    std::array<double, kDenseLimit> y{};
    for (std::size_t k = 0; k < a.nnz(); ++k) x[a.index[k]] = a.value[k];
    for (std::size_t k = 0; k < b.nnz(); ++k) y[b.index[k]] = b.value[k];
    for (std::size_t j = 0; j < a.dim; ++j) f(x[j], y[j]);
    return;
  }
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < a.nnz() || k < b.nnz()) {
    if (k == b.nnz() || (i < a.nnz() && a.index[i] < b.index[k])) {
      f(a.value[i++], 0.0);
    } else if (i == a.nnz() || b.index[k] < a.index[i]) {
      f(0.0, b.value[k++]);
    } else {
      f(a.value[i++], b.value[k++]);
    }
  }
}

}  // namespace

double dist_euclidean(const SparseVector& a, const SparseVector& b) {
  double sum = 0;
  for_each_pair(a, b, [&](double x, double y) { sum += (x - y) * (x - y); });
  return std::sqrt(sum);
}

double dist_manhattan(const SparseVector& a, const SparseVector& b) {
  double sum = 0;
  for_each_pair(a, b, [&](double x, double y) { sum += std::abs(x - y); });
  return sum;
}

namespace {

struct CosineParts {
  double dot = 0;
  double aa = 0;
  double bb = 0;
};

CosineParts cosine_parts(const SparseVector& a, const SparseVector& b) {
  CosineParts p;
  for_each_pair(a, b, [&](double x, double y) {
    p.dot += x * y;
    p.aa += x * x;
    p.bb += y * y;
  });
  return p;
}

double cosine_from_parts(const CosineParts& p) {
  return std::clamp(p.dot / std::sqrt(p.aa * p.bb), -1.0, 1.0);
}

}  // namespace

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const auto p = cosine_parts(a, b);
  if (p.aa == 0 || p.bb == 0) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector is undefined");
  }
  return cosine_from_parts(p);
}

CosineDistance cosine_distance(const SparseVector& a, const SparseVector& b) {
  const auto p = cosine_parts(a, b);
  const bool a_zero = p.aa == 0;
  const bool b_zero = p.bb == 0;
  if (a_zero || b_zero) return {a_zero && b_zero ? 0.0 : 1.0, true};
  return {std::clamp(1.0 - cosine_from_parts(p), 0.0, 1.0), false};
}

double dist_cosine(const SparseVector& a, const SparseVector& b) {
  return cosine_distance(a, b).value;
}

double jaccard_similarity(const SparseVector& a, const SparseVector& b) {
  double mins = 0;
  double maxs = 0;
  bool negative = false;
  for_each_pair(a, b, [&](double x, double y) {
    negative = negative || x < 0 || y < 0;
    mins += std::min(x, y);
    maxs += std::max(x, y);
  });
  if (negative) throw Error(ErrorCode::NegativeEntry, "weighted Jaccard needs non-negative entries");
  return maxs == 0 ? 1.0 : mins / maxs;
}

double dist_jaccard(const SparseVector& a, const SparseVector& b) {
  return 1.0 - jaccard_similarity(a, b);
}

double distance(Measure m, const SparseVector& a, const SparseVector& b) {
  switch (m) {
    case Measure::Euclidean: return dist_euclidean(a, b);
    case Measure::Manhattan: return dist_manhattan(a, b);
    case Measure::Cosine: return dist_cosine(a, b);
    case Measure::Jaccard: return dist_jaccard(a, b);
  }
  return 0;
}

DistanceMatrix pairwise_distances(const DocTermMatrix& dtm, Measure measure,
                                  const std::vector<std::size_t>& rows, unsigned threads) {
  std::vector<std::size_t> idx = rows;
  if (idx.empty()) {
    idx.resize(dtm.n());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  }
  DistanceMatrix m;
  m.measure = measure;
  m.n = idx.size();
  m.d.assign(m.n * m.n, 0.0);
  for (std::size_t i : idx) m.labels.push_back(dtm.row_labels.at(i));

  std::vector<unsigned char> flagged(m.n * m.n, 0);
  parallel_for(m.n, threads, [&](std::size_t i) {
    const auto& xi = dtm.rows[idx[i]];
    for (std::size_t j = i + 1; j < m.n; ++j) {
      const auto& xj = dtm.rows[idx[j]];
      double v;
      if (measure == Measure::Cosine) {
        const auto cd = cosine_distance(xi, xj);
        v = cd.value;
        flagged[i * m.n + j] = cd.zero_vector ? 1 : 0;
      } else {
        v = distance(measure, xi, xj);
      }
      m.d[i * m.n + j] = v;
      m.d[j * m.n + i] = v;
    }
  });
  m.zero_vector_pairs = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
  return m;
}

DistanceMatrix within_book_matrix(const DocTermMatrix& dtm, BookLabel book, Measure measure,
                                  unsigned threads) {
  const auto rows = dtm.rows_of(book);
  if (rows.empty()) {
    throw Error(ErrorCode::UnknownBook, std::string(display_name(book)) + " has no chapters");
  }
  return pairwise_distances(dtm, measure, rows, threads);
}

double aggregate(std::vector<double> values, Aggregator agg) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "aggregate of no distances");
  switch (agg) {
    case Aggregator::Min:
      return *std::min_element(values.begin(), values.end());
    case Aggregator::Max:
      return *std::max_element(values.begin(), values.end());
    case Aggregator::Mean: {
      double sum = 0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
    case Aggregator::Median: {
      const std::size_t mid = values.size() / 2;
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
      const double upper = values[mid];
      if (values.size() % 2 == 1) return upper;
      const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
      return (lower + upper) / 2.0;
    }
  }
  return 0;
}

BookDistanceMatrix between_book_matrix(const DistanceMatrix& all, Aggregator agg) {
  BookDistanceMatrix out;
  out.measure = all.measure;
  out.aggregator = agg;

  std::vector<std::vector<std::size_t>> members(kBookCount);
  for (std::size_t i = 0; i < all.n; ++i) members[index_of(all.labels[i].book)].push_back(i);
  for (BookLabel b : kAllBooks) {
    if (!members[index_of(b)].empty()) out.books.push_back(b);
  }
  if (out.books.size() < 2) {
    throw Error(ErrorCode::TooFewBooks, "between-book distances need at least two books");
  }

  const std::size_t m = out.books.size();
  out.delta.assign(m * m, std::nullopt);
  for (std::size_t a = 0; a < m; ++a) {
    const auto& ra = members[index_of(out.books[a])];
    for (std::size_t b = a; b < m; ++b) {
      const auto& rb = members[index_of(out.books[b])];
      std::vector<double> values;
      if (a == b) {
        for (std::size_t x = 0; x < ra.size(); ++x) {
          for (std::size_t y = x + 1; y < ra.size(); ++y) values.push_back(all.at(ra[x], ra[y]));
        }
        if (values.empty()) continue;  // single-chapter book: diagonal undefined
      } else {
        values.reserve(ra.size() * rb.size());
        for (std::size_t x : ra) {
          for (std::size_t y : rb) values.push_back(all.at(x, y));
        }
      }
      const double v = aggregate(std::move(values), agg);
      out.delta[a * m + b] = v;
      out.delta[b * m + a] = v;
    }
  }
  return out;
}

BookDistanceMatrix between_book_matrix(const DocTermMatrix& dtm, Measure measure, Aggregator agg,
                                       unsigned threads) {
  if (dtm.books().size() < 2) {
    throw Error(ErrorCode::TooFewBooks, "between-book distances need at least two books");
  }
  return between_book_matrix(pairwise_distances(dtm, measure, {}, threads), agg);
}

std::string row_name(const RowLabel& l) {
  return std::string(abbreviation(l.book)) + ":" + std::to_string(l.chapter);
}

std::string distance_matrix_csv(const DistanceMatrix& m) {
  std::ostringstream out;
  out << "chapter";
  for (const auto& l : m.labels) out << ',' << row_name(l);
  out << '\n';
  for (std::size_t i = 0; i < m.n; ++i) {
    out << row_name(m.labels[i]);
    for (std::size_t j = 0; j < m.n; ++j) out << ',' << format_double(m.at(i, j));
    out << '\n';
  }
  return out.str();
}

std::string distance_matrix_jsonl(const DistanceMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      nlohmann::ordered_json rec;
      rec["row"] = row_name(m.labels[i]);
      rec["col"] = row_name(m.labels[j]);
      rec["value"] = m.at(i, j);
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

std::string book_matrix_csv(const BookDistanceMatrix& m) {
  std::ostringstream out;
  out << "book";
  for (BookLabel b : m.books) out << ',' << abbreviation(b);
  out << '\n';
  for (std::size_t a = 0; a < m.size(); ++a) {
    out << abbreviation(m.books[a]);
    for (std::size_t b = 0; b < m.size(); ++b) {
      const auto& v = m.at(a, b);
      out << ',' << (v ? format_double(*v) : std::string("NA"));
    }
    out << '\n';
  }
  return out.str();
}

std::string book_matrix_jsonl(const BookDistanceMatrix& m) {
  std::string out;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      nlohmann::ordered_json rec;
      rec["row"] = abbreviation(m.books[a]);
      rec["col"] = abbreviation(m.books[b]);
      const auto& v = m.at(a, b);
      rec["value"] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace scriptsim
