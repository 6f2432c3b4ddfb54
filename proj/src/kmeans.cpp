#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "scriptsim/cluster.hpp"
#include "scriptsim/error.hpp"
#include "scriptsim/parallel.hpp"
#include "scriptsim/rng.hpp"

namespace scriptsim {

namespace {

void check_measure(Measure m) {
  if (m != Measure::Euclidean && m != Measure::Manhattan) {
    throw Error(ErrorCode::InvalidArgument,
                "k-means centroids are defined for euclidean and manhattan only, not " +
                    std::string(to_string(m)));
  }
}

// Centroid norms cached per cluster: squared L2 for euclidean, L1 for manhattan.
struct CentroidSet {
  std::vector<std::vector<double>> c;
  std::vector<double> norm;
};

CentroidSet with_norms(std::vector<std::vector<double>> c, Measure m) {
  CentroidSet s;
  s.norm.reserve(c.size());
  for (const auto& v : c) {
    double acc = 0;
    for (double x : v) acc += m == Measure::Euclidean ? x * x : std::abs(x);
    s.norm.push_back(acc);
  }
  s.c = std::move(c);
  return s;
}

// Squared euclidean or L1 distance from a sparse row to a dense centroid,
// expanded around the centroid norm so only the row's nonzeros are visited.
double row_cost(const SparseVector& x, const std::vector<double>& c, double c_norm, Measure m) {
  double acc = c_norm;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double cj = c[x.index[k]];
    const double diff = x.value[k] - cj;
    if (m == Measure::Euclidean) {
      acc += diff * diff - cj * cj;
    } else {
      acc += std::abs(diff) - std::abs(cj);
    }
  }
  return std::max(acc, 0.0);
}

std::size_t nearest(const SparseVector& x, const CentroidSet& cs, Measure m, double* cost = nullptr) {
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cs.c.size(); ++j) {
    const double d = row_cost(x, cs.c[j], cs.norm[j], m);
    if (d < best_cost) {
      best_cost = d;
      best = j;
    }
  }
  if (cost != nullptr) *cost = best_cost;
  return best;
}

std::vector<double> dense_row(const SparseVector& x) { return x.to_dense(); }

CentroidSet kmeanspp_init(const std::vector<SparseVector>& rows, std::size_t k, Measure m, Rng& rng) {
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> centers;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  centers.push_back(dense_row(rows[first]));
  chosen[first] = true;

  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const auto cs = with_norms({centers.back()}, m);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], row_cost(rows[i], cs.c[0], cs.norm[0], m));
      total += best[i];
    }
    std::size_t pick = n;
    if (total > 0) {
      const double r = rng.uniform() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best[i];
        if (best[i] > 0 && r < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the tail
        for (std::size_t i = n; i-- > 0;) {
          if (best[i] > 0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // every row coincides with a center; take an unused row at random
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[static_cast<std::size_t>(rng.below(unused.size()))];
    }
    chosen[pick] = true;
    centers.push_back(dense_row(rows[pick]));
  }
  return with_norms(std::move(centers), m);
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::sort(v.begin(), v.end());
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

// Gives every empty cluster the row farthest from its current centroid,
// taken from clusters that keep at least one member.
void repair_empty(const std::vector<SparseVector>& rows, std::vector<std::size_t>& assign,
                  const CentroidSet& cs, Measure m) {
  const std::size_t k = cs.c.size();
  std::vector<std::size_t> size(k, 0);
  for (std::size_t a : assign) ++size[a];
  for (std::size_t c = 0; c < k; ++c) {
    if (size[c] != 0) continue;
    std::size_t far = rows.size();
    double far_cost = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (size[assign[i]] < 2) continue;
      const double d = row_cost(rows[i], cs.c[assign[i]], cs.norm[assign[i]], m);
      if (d > far_cost) {
        far_cost = d;
        far = i;
      }
    }
    if (far == rows.size()) continue;  // cannot happen while k <= n
    --size[assign[far]];
    assign[far] = c;
    size[c] = 1;
  }
}

}  // namespace

std::vector<std::vector<double>> kmeans_centroids(const std::vector<SparseVector>& rows,
                                                  const std::vector<std::size_t>& assign,
                                                  std::size_t k, Measure measure) {
  check_measure(measure);
  const std::size_t p = rows.empty() ? 0 : rows.front().dim;
  std::vector<std::vector<double>> c(k, std::vector<double>(p, 0.0));
  std::vector<std::size_t> size(k, 0);
  for (std::size_t a : assign) ++size[a];

  if (measure == Measure::Euclidean) {
    // fixed row order keeps the sums reproducible
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& ci = c[assign[i]];
      const auto& x = rows[i];
      for (std::size_t t = 0; t < x.nnz(); ++t) ci[x.index[t]] += x.value[t];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (size[j] == 0) continue;
      const double inv = static_cast<double>(size[j]);
      for (double& v : c[j]) v /= inv;
    }
    return c;
  }

  std::vector<std::map<std::uint32_t, std::vector<double>>> columns(k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& x = rows[i];
    for (std::size_t t = 0; t < x.nnz(); ++t) columns[assign[i]][x.index[t]].push_back(x.value[t]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (auto& [col, values] : columns[j]) {
      values.resize(size[j], 0.0);  // the cluster's zeros in this column
      c[j][col] = median_of(values);
    }
  }
  return c;
}

std::pair<double, double> kmeans_objective(const std::vector<SparseVector>& rows,
                                           const std::vector<std::size_t>& assign,
                                           const std::vector<std::vector<double>>& centroids,
                                           Measure measure) {
  check_measure(measure);
  const auto cs = with_norms(centroids, measure);
  double obj = 0;
  double plain = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = row_cost(rows[i], cs.c[assign[i]], cs.norm[assign[i]], measure);
    obj += d;
    plain += measure == Measure::Euclidean ? std::sqrt(d) : d;
  }
  return {obj, plain};
}

Partition kmeans_single(const std::vector<SparseVector>& rows, std::size_t k, Measure measure,
                        std::uint64_t seed, std::size_t max_iter, double tol, unsigned threads) {
  check_measure(measure);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "k-means on no rows");
  if (k == 0 || k > rows.size()) {
    throw Error(ErrorCode::KTooLarge,
                "k=" + std::to_string(k) + " with " + std::to_string(rows.size()) + " rows");
  }
  const std::size_t n = rows.size();
  Rng rng(seed);
  CentroidSet cs = kmeanspp_init(rows, k, measure, rng);

  std::vector<std::size_t> assign(n);
  parallel_for(n, threads, [&](std::size_t i) { assign[i] = nearest(rows[i], cs, measure); });

  Partition part;
  part.k = k;
  part.measure = measure;
  part.seed = seed;
  for (std::size_t it = 1; it <= std::max<std::size_t>(max_iter, 1); ++it) {
    repair_empty(rows, assign, cs, measure);
    cs = with_norms(kmeans_centroids(rows, assign, k, measure), measure);
    const auto [obj, plain] = kmeans_objective(rows, assign, cs.c, measure);
    part.objective_history.push_back(obj);
    part.iterations = it;
    const auto& h = part.objective_history;
    if (h.size() > 1 && h[h.size() - 2] - obj < tol) break;

    std::vector<std::size_t> next(n);
    parallel_for(n, threads, [&](std::size_t i) { next[i] = nearest(rows[i], cs, measure); });
    if (next == assign) break;
    assign = std::move(next);
  }

  part.assign = std::move(assign);
  part.centroids = std::move(cs.c);
  std::tie(part.objective, part.plain_objective) =
      kmeans_objective(rows, part.assign, part.centroids, measure);
  return part;
}

Partition kmeans(const std::vector<SparseVector>& rows, const KMeansOptions& opts) {
  Partition best;
  bool have = false;
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Partition p = kmeans_single(rows, opts.k, opts.measure, derive_seed(opts.seed, r), opts.max_iter,
                                opts.tol, opts.threads);
    p.seed = opts.seed;
    p.restart = r;
    if (!have || p.objective < best.objective) {
      best = std::move(p);
      have = true;
    }
  }
  return best;
}

Partition kmeans(const DocTermMatrix& dtm, const KMeansOptions& opts) {
  return kmeans(dtm.rows, opts);
}

std::vector<SweepResult> sweep_k(const DocTermMatrix& dtm, std::size_t k_min, std::size_t k_max,
                                 const KMeansOptions& base) {
  if (k_min == 0 || k_min > k_max) {
    throw Error(ErrorCode::InvalidArgument, "empty k range");
  }
  std::vector<SweepResult> out;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    KMeansOptions o = base;
    o.k = k;
    o.seed = derive_seed(base.seed, k);
    SweepResult r;
    r.k = k;
    r.partition = kmeans(dtm, o);
    r.graph = book_graph(r.partition, dtm.row_labels);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace scriptsim
