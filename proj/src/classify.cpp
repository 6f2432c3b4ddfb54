#include "scriptsim/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "scriptsim/error.hpp"
#include "scriptsim/parallel.hpp"
#include "scriptsim/rng.hpp"

namespace scriptsim {

using ojson = nlohmann::ordered_json;

std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::SvmLinear: return "svm-linear";
    case ClassifierKind::RandomForest: return "random-forest";
  }
  return "knn";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  for (auto k : {ClassifierKind::Knn, ClassifierKind::SvmLinear, ClassifierKind::RandomForest}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + std::string(text) + "'");
}

namespace {

std::size_t train_count(std::size_t n, double fraction) {
  const auto t = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(t, 1, n - 1);
}

BookLabel vote(const std::array<std::size_t, kBookCount>& votes) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kBookCount; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return kAllBooks[best];
}

void require_train(const LabeledRows& train) {
  if (train.rows.empty()) throw Error(ErrorCode::EmptyTrain, "no training rows");
  if (train.rows.size() != train.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "training rows and labels differ in length");
  }
}

}  // namespace

Split split(const std::vector<BookLabel>& labels, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0 && spec.train_fraction < 1)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie strictly between 0 and 1");
  }
  if (labels.size() < 2) throw Error(ErrorCode::TooFewChapters, "need at least two rows to split");

  Rng rng(spec.seed);
  Split out;
  auto take = [&](std::vector<std::size_t> idx) {
    rng.shuffle(idx.begin(), idx.end());
    const std::size_t t = train_count(idx.size(), spec.train_fraction);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(t), idx.end());
  };

  if (spec.stratified) {
    for (BookLabel b : kAllBooks) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == b) idx.push_back(i);
      }
      if (idx.empty()) continue;
      if (idx.size() < 2) {
        throw Error(ErrorCode::TooFewChapters,
                    std::string(display_name(b)) + " has fewer than two chapters");
      }
      take(std::move(idx));
    }
  } else {
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    take(std::move(idx));
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

LabeledRows select_rows(const DocTermMatrix& dtm, const std::vector<std::size_t>& idx) {
  LabeledRows out;
  out.rows.reserve(idx.size());
  out.labels.reserve(idx.size());
  for (std::size_t i : idx) {
    out.rows.push_back(dtm.rows.at(i));
    out.labels.push_back(dtm.row_labels.at(i).book);
  }
  return out;
}

std::vector<BookLabel> knn_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                   const KnnParams& params, unsigned threads) {
  require_train(train);
  if (params.k == 0) throw Error(ErrorCode::InvalidArgument, "knn needs k >= 1");
  const std::size_t k = std::min(params.k, train.rows.size());
  std::vector<BookLabel> out(test.size());
  parallel_for(test.size(), threads, [&](std::size_t t) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(train.rows.size());
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
      d.emplace_back(distance(params.measure, test[t], train.rows[i]), i);
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::array<std::size_t, kBookCount> votes{};
    for (std::size_t j = 0; j < k; ++j) ++votes[index_of(train.labels[d[j].second])];
    out[t] = vote(votes);
  });
  return out;
}

namespace {

// Dense copy of the rows, optionally z-scored with the given column statistics.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1/std, or 0 for constant columns

  static Standardizer fit(const std::vector<SparseVector>& rows, std::size_t p, bool enabled) {
    Standardizer s;
    s.mean.assign(p, 0.0);
    s.scale.assign(p, 1.0);
    if (!enabled) return s;
    const double n = static_cast<double>(rows.size());
    std::vector<double> sq(p, 0.0);
    std::vector<std::size_t> nonzero(p, 0);
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.nnz(); ++k) s.mean[r.index[k]] += r.value[k];
    }
    for (double& m : s.mean) m /= n;
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.nnz(); ++k) {
        const double dv = r.value[k] - s.mean[r.index[k]];
        sq[r.index[k]] += dv * dv;
        ++nonzero[r.index[k]];
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double zeros = n - static_cast<double>(nonzero[j]);
      const double var = (sq[j] + zeros * s.mean[j] * s.mean[j]) / n;
      s.scale[j] = var > 1e-24 ? 1.0 / std::sqrt(var) : 0.0;
    }
    return s;
  }

  // Dense transformed row with a trailing constant 1 for the bias.
  std::vector<double> apply(const SparseVector& r) const {
    const std::size_t p = mean.size();
    std::vector<double> x(p + 1);
    for (std::size_t j = 0; j < p; ++j) x[j] = -mean[j] * scale[j];
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const std::size_t j = r.index[k];
      x[j] = (r.value[k] - mean[j]) * scale[j];
    }
    x[p] = 1.0;
    return x;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// Pegasos on the hinge loss with w kept as scale * v so the shrink step is O(1).
std::vector<double> pegasos(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            double lambda, std::size_t epochs, std::uint64_t seed) {
  const std::size_t dim = x.front().size();
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t e = 0; e < epochs; ++e) {
    Rng rng(derive_seed(seed, e));
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y[i] * scale * dot(v, x[i]);
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1) {
        const double step = eta * y[i] / scale;
        for (std::size_t j = 0; j < dim; ++j) v[j] += step * x[i][j];
      }
      if (scale < 1e-9) {
        for (double& vj : v) vj *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& vj : v) vj *= scale;
  return v;
}

}  // namespace

std::vector<BookLabel> svm_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                   const SvmParams& params, std::uint64_t seed) {
  require_train(train);
  if (!(params.lambda > 0)) throw Error(ErrorCode::InvalidArgument, "svm lambda must be positive");
  const std::size_t p = train.rows.front().dim;
  const auto st = Standardizer::fit(train.rows, p, params.standardize);

  std::vector<std::vector<double>> x;
  x.reserve(train.rows.size());
  for (const auto& r : train.rows) x.push_back(st.apply(r));

  std::vector<BookLabel> present;
  for (BookLabel b : kAllBooks) {
    if (std::find(train.labels.begin(), train.labels.end(), b) != train.labels.end()) present.push_back(b);
  }

  std::vector<std::vector<double>> weights;
  for (BookLabel c : present) {
    std::vector<double> y(train.labels.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = train.labels[i] == c ? 1.0 : -1.0;
    weights.push_back(pegasos(x, y, params.lambda, params.epochs, derive_seed(seed, index_of(c))));
  }

  std::vector<BookLabel> out;
  out.reserve(test.size());
  for (const auto& r : test) {
    const auto xr = st.apply(r);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < present.size(); ++c) {
      const double s = dot(weights[c], xr);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    out.push_back(present[best]);
  }
  return out;
}

std::vector<BookLabel> train_predict(const LabeledRows& train, const std::vector<SparseVector>& test,
                                     const ClassifierSpec& spec, unsigned threads) {
  switch (spec.kind) {
    case ClassifierKind::Knn: return knn_predict(train, test, spec.knn, threads);
    case ClassifierKind::SvmLinear: return svm_predict(train, test, spec.svm, spec.seed);
    case ClassifierKind::RandomForest: return forest_predict(train, test, spec.forest, spec.seed, threads);
  }
  return {};
}

ConfusionMatrix confusion(const std::vector<BookLabel>& predicted, const std::vector<BookLabel>& actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions for " +
                                               std::to_string(actual.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++cm.counts[index_of(predicted[i])][index_of(actual[i])];
    if (predicted[i] == actual[i]) ++cm.trace;
  }
  cm.total = predicted.size();
  cm.accuracy = cm.total > 0 ? static_cast<double>(cm.trace) / static_cast<double>(cm.total) : 0.0;
  return cm;
}

BenchmarkReport benchmark(const DocTermMatrix& dtm, const SplitSpec& split_spec,
                          const std::vector<ClassifierSpec>& specs, unsigned threads) {
  std::vector<BookLabel> labels;
  for (const auto& l : dtm.row_labels) labels.push_back(l.book);

  BenchmarkReport report;
  report.split_spec = split_spec;
  report.split = split(labels, split_spec);
  const auto train = select_rows(dtm, report.split.train);
  const auto test = select_rows(dtm, report.split.test);
  for (const auto& spec : specs) {
    ClassifierResult r;
    r.spec = spec;
    r.predicted = train_predict(train, test.rows, spec, threads);
    r.confusion = confusion(r.predicted, test.labels);
    report.results.push_back(std::move(r));
  }
  return report;
}

namespace {

std::vector<BookLabel> by_display_name() {
  std::vector<BookLabel> order(kAllBooks.begin(), kAllBooks.end());
  std::sort(order.begin(), order.end(),
            [](BookLabel a, BookLabel b) { return display_name(a) < display_name(b); });
  return order;
}

ojson hyperparameters(const ClassifierSpec& s) {
  switch (s.kind) {
    case ClassifierKind::Knn:
      return {{"k", s.knn.k}, {"measure", to_string(s.knn.measure)}};
    case ClassifierKind::SvmLinear:
      return {{"lambda", s.svm.lambda}, {"epochs", s.svm.epochs}, {"standardize", s.svm.standardize}};
    case ClassifierKind::RandomForest:
      return {{"n_trees", s.forest.n_trees},
              {"max_depth", s.forest.max_depth},
              {"features_per_split", s.forest.features_per_split},
              {"bootstrap", s.forest.bootstrap},
              {"min_samples_split", s.forest.min_samples_split}};
  }
  return {};
}

}  // namespace

std::string confusion_csv(const ConfusionMatrix& cm) {
  const auto order = by_display_name();
  std::ostringstream out;
  out << "predicted\\actual";
  for (BookLabel b : order) out << ',' << display_name(b);
  out << '\n';
  for (BookLabel pred : order) {
    out << display_name(pred);
    for (BookLabel act : order) out << ',' << cm.counts[index_of(pred)][index_of(act)];
    out << '\n';
  }
  return out.str();
}

std::string benchmark_json(const BenchmarkReport& report, const DocTermMatrix& dtm) {
  const auto order = by_display_name();
  ojson j;
  j["split"] = {{"train_fraction", report.split_spec.train_fraction},
                {"seed", report.split_spec.seed},
                {"stratified", report.split_spec.stratified},
                {"n_train", report.split.train.size()},
                {"n_test", report.split.test.size()}};
  j["classifiers"] = ojson::array();
  for (const auto& r : report.results) {
    ojson c;
    c["classifier"] = to_string(r.spec.kind);
    c["hyperparameters"] = hyperparameters(r.spec);
    c["seed"] = r.spec.seed;
    c["accuracy"] = r.confusion.accuracy;
    c["trace"] = r.confusion.trace;
    c["total"] = r.confusion.total;
    ojson conf;
    conf["orientation"] = "rows=predicted, columns=actual";
    conf["labels"] = ojson::array();
    for (BookLabel b : order) conf["labels"].push_back(display_name(b));
    conf["counts"] = ojson::array();
    for (BookLabel pred : order) {
      ojson row = ojson::array();
      for (BookLabel act : order) row.push_back(r.confusion.counts[index_of(pred)][index_of(act)]);
      conf["counts"].push_back(std::move(row));
    }
    c["confusion"] = std::move(conf);
    ojson preds = ojson::array();
    for (std::size_t i = 0; i < r.predicted.size(); ++i) {
      const auto& l = dtm.row_labels.at(report.split.test[i]);
      preds.push_back({{"row", row_name(l)}, {"predicted", display_name(r.predicted[i])}});
    }
    c["predictions"] = std::move(preds);
    j["classifiers"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

}  // namespace scriptsim
