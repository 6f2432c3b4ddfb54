#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scriptsim/classify.hpp"
#include "scriptsim/error.hpp"
#include "scriptsim/parallel.hpp"
#include "scriptsim/rng.hpp"

namespace scriptsim {

namespace {

// Column-major view of the training rows: for every feature, the rows with
// a nonzero value in it.
struct Columns {
  std::size_t p = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> col;

  explicit Columns(const LabeledRows& train) {
    p = train.rows.front().dim;
    col.resize(p);
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
      const auto& r = train.rows[i];
      if (r.dim != p) throw Error(ErrorCode::DimensionMismatch, "training rows differ in dimension");
      for (std::size_t k = 0; k < r.nnz(); ++k) {
        col[r.index[k]].emplace_back(static_cast<std::uint32_t>(i), r.value[k]);
      }
    }
  }
};

using Counts = std::array<std::size_t, kBookCount>;

BookLabel majority(const Counts& c) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kBookCount; ++k) {
    if (c[k] > c[best]) best = k;
  }
  return kAllBooks[best];
}

// n * gini = n - sum c^2 / n
double scaled_gini(const Counts& c, std::size_t n) {
  if (n == 0) return 0;
  double sq = 0;
  for (std::size_t v : c) sq += static_cast<double>(v) * static_cast<double>(v);
  return static_cast<double>(n) - sq / static_cast<double>(n);
}

struct Candidate {
  double score = std::numeric_limits<double>::infinity();  // n_L gini_L + n_R gini_R
  std::size_t feature = 0;
  double threshold = 0;
  bool valid = false;

  bool better_than(const Candidate& o) const {
    if (!o.valid) return true;
    if (score != o.score) return score < o.score;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

struct ValueGroup {
  double value;
  Counts counts;
  std::size_t n;
};

struct TreeBuilder {
  const LabeledRows& train;
  const Columns& cols;
  Rng rng;
  std::vector<std::size_t> multiplicity;  // per training row, within the current node
  std::vector<std::size_t> feature_order;

  TreeBuilder(const LabeledRows& t, const Columns& c, const DecisionTree::Options& o)
      : train(t), cols(c), rng(o.seed), multiplicity(t.rows.size(), 0), feature_order(c.p) {
    std::iota(feature_order.begin(), feature_order.end(), std::size_t{0});
  }

  // Best threshold on one feature for the samples currently marked in
  // `multiplicity`; returns an invalid candidate when the feature is constant.
  Candidate evaluate(std::size_t feature, const Counts& node_counts, std::size_t node_n) {
    std::vector<ValueGroup> groups;
    Counts zero_counts = node_counts;
    std::size_t zero_n = node_n;
    std::vector<std::pair<double, std::uint32_t>> hits;
    for (const auto& [row, value] : cols.col[feature]) {
      if (multiplicity[row] == 0) continue;
      hits.emplace_back(value, row);
    }
    if (hits.empty()) return {};
    for (const auto& [value, row] : hits) {
      const std::size_t m = multiplicity[row];
      zero_counts[index_of(train.labels[row])] -= m;
      zero_n -= m;
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& [value, row] : hits) {
      if (groups.empty() || groups.back().value != value) groups.push_back({value, {}, 0});
      groups.back().counts[index_of(train.labels[row])] += multiplicity[row];
      groups.back().n += multiplicity[row];
    }
    if (zero_n > 0) {
      ValueGroup z{0.0, zero_counts, zero_n};
      auto pos = std::lower_bound(groups.begin(), groups.end(), 0.0,
                                  [](const ValueGroup& g, double v) { return g.value < v; });
      groups.insert(pos, z);
    }
    if (groups.size() < 2) return {};

    Candidate best;
    Counts left{};
    std::size_t left_n = 0;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      for (std::size_t c = 0; c < kBookCount; ++c) left[c] += groups[g].counts[c];
      left_n += groups[g].n;
      Counts right{};
      for (std::size_t c = 0; c < kBookCount; ++c) right[c] = node_counts[c] - left[c];
      Candidate cand;
      cand.score = scaled_gini(left, left_n) + scaled_gini(right, node_n - left_n);
      cand.feature = feature;
      cand.threshold = groups[g].value + (groups[g + 1].value - groups[g].value) / 2.0;
      cand.valid = true;
      if (cand.better_than(best)) best = cand;
    }
    return best;
  }
};

}  // namespace

void DecisionTree::fit(const LabeledRows& train, const Options& opts,
                       const std::vector<std::size_t>& sample) {
  if (train.rows.empty()) throw Error(ErrorCode::EmptyTrain, "no training rows");
  const Columns cols(train);
  std::vector<std::size_t> s = sample;
  if (s.empty()) {
    s.resize(train.rows.size());
    std::iota(s.begin(), s.end(), std::size_t{0});
  }

  TreeBuilder tb(train, cols, opts);
  const std::size_t p = cols.p;
  const std::size_t want = opts.features_per_split == 0 ? p : std::min(opts.features_per_split, p);
  nodes_.clear();

  struct Pending {
    std::size_t node;
    std::vector<std::size_t> samples;
  };
  std::vector<Pending> stack;
  nodes_.push_back(Node{});
  stack.push_back({0, std::move(s)});

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();
    Node& node = nodes_[cur.node];

    Counts counts{};
    for (std::size_t r : cur.samples) ++counts[index_of(train.labels[r])];
    node.label = majority(counts);
    const std::size_t n = cur.samples.size();
    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || n < std::max<std::size_t>(opts.min_samples_split, 2) ||
        (opts.max_depth != 0 && node.depth >= opts.max_depth)) {
      continue;
    }

    for (std::size_t r : cur.samples) ++tb.multiplicity[r];
    Candidate best;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < p && scored < want; ++i) {
      // partial Fisher-Yates: position i receives a uniformly drawn remaining feature
      const std::size_t j = i + static_cast<std::size_t>(tb.rng.below(p - i));
      std::swap(tb.feature_order[i], tb.feature_order[j]);
      const Candidate c = tb.evaluate(tb.feature_order[i], counts, n);
      if (!c.valid) continue;
      ++scored;
      if (c.better_than(best)) best = c;
    }
    for (std::size_t r : cur.samples) tb.multiplicity[r] = 0;
    if (!best.valid) continue;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : cur.samples) {
      const auto& x = train.rows[r];
      const auto it = std::lower_bound(x.index.begin(), x.index.end(), static_cast<std::uint32_t>(best.feature));
      const double v = it != x.index.end() && *it == best.feature ? x.value[static_cast<std::size_t>(it - x.index.begin())] : 0.0;
      (v <= best.threshold ? left : right).push_back(r);
    }

    const std::size_t depth = node.depth;
    node.feature = static_cast<std::int64_t>(best.feature);
    node.threshold = best.threshold;
    const std::size_t li = nodes_.size();
    const std::size_t ri = li + 1;
    nodes_[cur.node].left = li;
    nodes_[cur.node].right = ri;
    Node child;
    child.depth = depth + 1;
    nodes_.push_back(child);
    nodes_.push_back(child);
    stack.push_back({ri, std::move(right)});
    stack.push_back({li, std::move(left)});
  }
}

BookLabel DecisionTree::predict(const SparseVector& x) const {
  if (nodes_.empty()) throw Error(ErrorCode::EmptyTrain, "tree is not fitted");
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const auto f = static_cast<std::uint32_t>(nodes_[at].feature);
    const auto it = std::lower_bound(x.index.begin(), x.index.end(), f);
    const double v = it != x.index.end() && *it == f ? x.value[static_cast<std::size_t>(it - x.index.begin())] : 0.0;
    at = v <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
  }
  return nodes_[at].label;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

void RandomForest::fit(const LabeledRows& train, const ForestParams& params, std::uint64_t seed,
                       unsigned threads) {
  if (train.rows.empty()) throw Error(ErrorCode::EmptyTrain, "no training rows");
  if (params.n_trees == 0) throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree");
  const std::size_t n = train.rows.size();
  const std::size_t p = train.rows.front().dim;
  const std::size_t features =
      params.features_per_split == 0
          ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))))
          : params.features_per_split;

  trees_.assign(params.n_trees, DecisionTree{});
  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = seed + t;
    std::vector<std::size_t> sample;
    if (params.bootstrap) {
      Rng boot(derive_seed(tree_seed, 1));
      sample.resize(n);
      for (auto& s : sample) s = static_cast<std::size_t>(boot.below(n));
      std::sort(sample.begin(), sample.end());
    }
    DecisionTree::Options o;
    o.max_depth = params.max_depth;
    o.features_per_split = features;
    o.min_samples_split = params.min_samples_split;
    o.seed = tree_seed;
    trees_[t].fit(train, o, sample);
  });
}

BookLabel RandomForest::predict(const SparseVector& x) const {
  Counts votes{};
  for (const auto& t : trees_) ++votes[index_of(t.predict(x))];
  return majority(votes);
}

std::vector<BookLabel> forest_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                      const ForestParams& params, std::uint64_t seed, unsigned threads) {
  RandomForest f;
  f.fit(train, params, seed, threads);
  std::vector<BookLabel> out;
  out.reserve(test.size());
  for (const auto& x : test) out.push_back(f.predict(x));
  return out;
}

}  // namespace scriptsim
