#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "scriptsim/error.hpp"
#include "scriptsim/pipeline.hpp"
#include "scriptsim/rng.hpp"
#include "text_util.hpp"

namespace scriptsim {

namespace pt = boost::property_tree;

StageSeeds stage_seeds(std::uint64_t base) {
  return StageSeeds{derive_seed(base, 1), derive_seed(base, 2), derive_seed(base, 3),
                    derive_seed(base, 4), derive_seed(base, 5)};
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    auto t = detail::trim(cur);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// Typed access to one INI section that remembers which keys were read so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return it->second.data();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    auto v = raw(key);
    if (!v) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (*v == "true" || *v == "yes" || *v == "1") {
        out = true;
      } else if (*v == "false" || *v == "no" || *v == "0") {
        out = false;
      } else {
        bad(where(key), "expected a boolean, got '" + *v + "'");
      }
    } else {
      T parsed{};
      auto res = std::from_chars(v->data(), v->data() + v->size(), parsed);
      if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
        bad(where(key), "malformed number '" + *v + "'");
      }
      out = parsed;
    }
  }

  template <class T, class Parse>
  void get_enum(const std::string& key, T& out, Parse parse) {
    auto v = raw(key);
    if (!v) return;
    try {
      out = parse(*v);
    } catch (const Error& e) {
      bad(where(key), e.what());
    }
  }

  template <class T, class Parse>
  void get_list(const std::string& key, std::vector<T>& out, Parse parse) {
    auto v = raw(key);
    if (!v) return;
    out.clear();
    for (const auto& item : split_list(*v)) {
      try {
        out.push_back(parse(item));
      } catch (const Error& e) {
        bad(where(key), e.what());
      }
    }
    if (out.empty()) bad(where(key), "empty list");
  }

  void finish() const {
    for (const auto& [key, value] : tree_) {
      if (!seen_.count(key)) bad(where(key), "unknown key");
    }
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }

  PipelineConfig cfg;
  for (const auto& [name, body] : tree) {
    if (!body.data().empty()) bad(name, "key outside of any section");
    Section s(name, body);
    if (name == "pipeline") {
      if (auto v = s.raw("out")) cfg.out_dir = resolve(base_dir, *v);
      s.get("seed", cfg.seed);
      s.get("threads", cfg.threads);
    } else if (name == "textprep") {
      s.get("english_stopwords", cfg.english_stopwords);
      if (auto v = s.raw("stopwords")) {
        for (const auto& f : split_list(*v)) cfg.stopword_files.push_back(resolve(base_dir, f));
      }
      s.get("min_tokens", cfg.min_tokens);
      s.get("min_df", cfg.min_df);
    } else if (name == "dtm") {
      s.get_enum("weighting", cfg.weighting, parse_weighting);
    } else if (name == "dist") {
      s.get_list("measures", cfg.measures, parse_measure);
      s.get_list("aggregators", cfg.aggregators, parse_aggregator);
    } else if (name == "cluster") {
      s.get_enum("measure", cfg.cluster_measure, parse_measure);
      s.get("k_min", cfg.k_min);
      s.get("k_max", cfg.k_max);
      s.get("restarts", cfg.restarts);
      s.get("max_iter", cfg.max_iter);
      s.get("tol", cfg.tol);
      s.get_enum("dendrogram_measure", cfg.dendrogram_measure, parse_measure);
      s.get_enum("dendrogram_aggregator", cfg.dendrogram_aggregator, parse_aggregator);
    } else if (name == "classify") {
      s.get("train_fraction", cfg.train_fraction);
      s.get("stratified", cfg.stratified);
      s.get_list("classifiers", cfg.classifiers, parse_classifier_kind);
    } else if (name == "knn") {
      s.get("k", cfg.knn.k);
      s.get_enum("measure", cfg.knn.measure, parse_measure);
    } else if (name == "svm") {
      s.get("lambda", cfg.svm.lambda);
      s.get("epochs", cfg.svm.epochs);
      s.get("standardize", cfg.svm.standardize);
    } else if (name == "forest") {
      s.get("n_trees", cfg.forest.n_trees);
      s.get("max_depth", cfg.forest.max_depth);
      s.get("features_per_split", cfg.forest.features_per_split);
      s.get("bootstrap", cfg.forest.bootstrap);
      s.get("min_samples_split", cfg.forest.min_samples_split);
    } else if (name.rfind("book.", 0) == 0) {
      const auto label = parse_book_label(name.substr(5));
      if (!label) bad(name, "unknown book label '" + name.substr(5) + "'");
      BookSpec b;
      b.label = *label;
      auto path = s.raw("path");
      if (!path || path->empty()) bad(s.where("path"), "missing");
      b.path = resolve(base_dir, *path);
      s.get_enum("rule", b.rule.kind, parse_seg_kind);
      if (auto v = s.raw("pattern")) b.rule.pattern = *v;
      for (const auto& other : cfg.books) {
        if (other.label == b.label) bad(name, "book listed twice");
      }
      cfg.books.push_back(std::move(b));
    } else {
      bad(name, "unknown section");
    }
    s.finish();
  }

  if (cfg.books.empty()) throw Error(ErrorCode::InvalidConfig, "no [book.<label>] sections");
  if (cfg.k_min < 2 || cfg.k_min > cfg.k_max) {
    throw Error(ErrorCode::InvalidConfig, "k range must satisfy 2 <= k_min <= k_max");
  }
  if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1)) {
    throw Error(ErrorCode::InvalidConfig, "train_fraction must lie in (0, 1)");
  }
  if (cfg.threads == 0) cfg.threads = 1;
  std::sort(cfg.books.begin(), cfg.books.end(),
            [](const BookSpec& a, const BookSpec& b) { return a.label < b.label; });
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "config file " + path.string() + " not found");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

}  // namespace scriptsim
