#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scriptsim/dtm.hpp"
#include "scriptsim/similarity.hpp"

namespace scriptsim {

struct KMeansOptions {
  std::size_t k = 2;
  Measure measure = Measure::Euclidean;  // euclidean or manhattan
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-9;
  std::size_t restarts = 10;
  unsigned threads = 1;
};

// Result of one k-means fit.
//
// For the euclidean measure the minimized objective is the sum of squared
// distances to the assigned centroid (centroid = mean); `plain_objective`
// sums the unsquared distances. For manhattan both equal the L1 sum
// (centroid = coordinatewise median).
struct Partition {
  std::size_t k = 0;
  Measure measure = Measure::Euclidean;
  std::vector<std::size_t> assign;             // cluster id per row
  std::vector<std::vector<double>> centroids;  // k dense vectors of dimension p
  double objective = 0;
  double plain_objective = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::size_t restart = 0;                 // restart that produced this fit
  std::vector<double> objective_history;   // objective after each centroid update
};

// Objective of `assign` against `centroids` under the rules above.
// Returns {objective, plain_objective}.
std::pair<double, double> kmeans_objective(const std::vector<SparseVector>& rows,
                                           const std::vector<std::size_t>& assign,
                                           const std::vector<std::vector<double>>& centroids,
                                           Measure measure);

// Centroids of the given assignment (mean or coordinatewise median).
std::vector<std::vector<double>> kmeans_centroids(const std::vector<SparseVector>& rows,
                                                  const std::vector<std::size_t>& assign,
                                                  std::size_t k, Measure measure);

// A single Lloyd run from a k-means++ start drawn from `seed`.
// Throws EmptyInput, KTooLarge (k > n or k == 0) and InvalidArgument for
// measures other than euclidean and manhattan.
Partition kmeans_single(const std::vector<SparseVector>& rows, std::size_t k, Measure measure,
                        std::uint64_t seed, std::size_t max_iter = 100, double tol = 1e-9,
                        unsigned threads = 1);

// Best (lowest objective) of `opts.restarts` independently seeded runs; ties
// keep the earliest restart.
Partition kmeans(const DocTermMatrix& dtm, const KMeansOptions& opts);
Partition kmeans(const std::vector<SparseVector>& rows, const KMeansOptions& opts);

// Book-level co-membership graph. weight(a, b) is the fraction of cross
// pairs (chapter of a, chapter of b) that share a cluster.
struct ClusterGraph {
  std::size_t k = 0;
  std::vector<BookLabel> nodes;
  std::vector<double> weight;  // row-major nodes.size()^2; diagonal unused (0)

  double at(std::size_t a, std::size_t b) const { return weight[a * nodes.size() + b]; }
};

ClusterGraph book_graph(const Partition& partition, const std::vector<RowLabel>& labels);

struct SweepResult {
  std::size_t k = 0;
  Partition partition;
  ClusterGraph graph;
};

// One best-of-restarts fit per k in [k_min, k_max]; per-k seeds derive from
// `base.seed`. Throws KTooLarge once k exceeds the row count.
std::vector<SweepResult> sweep_k(const DocTermMatrix& dtm, std::size_t k_min, std::size_t k_max,
                                 const KMeansOptions& base);

struct Merge {
  std::size_t a = 0;  // cluster ids: leaves 0..m-1, merge i creates id m+i
  std::size_t b = 0;
  double height = 0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<BookLabel> leaves;
  std::vector<Merge> merges;
};

// Average-linkage agglomeration over the off-diagonal cells of delta. Equal
// linkage values are broken by the lexicographic order of the two clusters'
// sorted leaf sets. Throws NonFiniteInput for missing or non-finite cells.
Dendrogram book_dendrogram(const BookDistanceMatrix& delta);

std::string to_newick(const Dendrogram& d);
std::string dendrogram_json(const Dendrogram& d);
std::string graph_dot(const ClusterGraph& g);
std::string graph_json(const ClusterGraph& g);
std::string partition_json(const Partition& p, const std::vector<RowLabel>& labels);

}  // namespace scriptsim
