#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "scriptsim/format.hpp"
#include "scriptsim/pipeline.hpp"
#include "scriptsim/textprep.hpp"
#include "text_util.hpp"

namespace scriptsim {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Dtm: return "dtm";
    case Stage::Dist: return "dist";
    case Stage::Cluster: return "cluster";
    case Stage::Classify: return "classify";
    case Stage::Report: return "report";
    case Stage::Run: return "run";
  }
  return "?";
}

Stage parse_stage(std::string_view text) {
  for (auto s : {Stage::Ingest, Stage::Dtm, Stage::Dist, Stage::Cluster, Stage::Classify, Stage::Report,
                 Stage::Run}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(text) + "'");
}

StageError::StageError(Stage stage, const Error& cause)
    : std::runtime_error("stage " + std::string(to_string(stage)) + " failed: " + cause.what()),
      stage_(stage),
      code_(cause.code()) {}

namespace {

std::string jsonl(const std::vector<ojson>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

ojson read_json(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidFormat, path.string() + ": " + e.what());
  }
}

std::vector<ojson> read_jsonl(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::vector<ojson> out;
  for (auto line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(ojson::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidFormat, path.string() + ": " + e.what());
    }
  }
  return out;
}

BookLabel book_from_json(const ojson& v, const fs::path& where) {
  if (!v.is_string()) throw Error(ErrorCode::InvalidFormat, where.string() + ": book is not a string");
  const auto b = parse_book_label(v.get<std::string>());
  if (!b) throw Error(ErrorCode::InvalidFormat, where.string() + ": unknown book " + v.dump());
  return *b;
}

void require(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::MissingUpstreamArtifact, path.string() + " not found; run the earlier stage first");
  }
}

DocTermMatrix load_dtm(const PipelineConfig& cfg) {
  require(cfg.out_dir / artifact::kDtmDir / "dtm.mtx");
  return read_dtm(cfg.out_dir / artifact::kDtmDir);
}

// ---- ingest ----

void stage_ingest(const PipelineConfig& cfg, std::ostream& log) {
  std::vector<RawBook> books;
  for (const auto& spec : cfg.books) books.push_back(load_book(spec.path, spec.label, spec.rule));
  const Corpus corpus = build_corpus(books);

  std::vector<ojson> manifest;
  std::vector<ojson> chapters;
  for (const auto& c : corpus.chapters) {
    manifest.push_back({{"book", label_id(c.book)}, {"index", c.index}, {"n_chars", c.raw_text.size()}});
    chapters.push_back({{"book", label_id(c.book)}, {"index", c.index}, {"text", c.raw_text}});
  }
  write_text_file(cfg.out_dir / artifact::kManifest, jsonl(manifest));
  write_text_file(cfg.out_dir / artifact::kChapters, jsonl(chapters));
  for (const auto& [book, count] : corpus.per_book_counts) {
    log << "ingest: " << display_name(book) << ": " << count << " chapters\n";
  }
}

// ---- dtm ----

std::vector<Chapter> load_chapters(const PipelineConfig& cfg) {
  const fs::path path = cfg.out_dir / artifact::kChapters;
  require(path);
  std::vector<Chapter> out;
  for (const auto& r : read_jsonl(path)) {
    Chapter c;
    try {
      c.book = book_from_json(r.at("book"), path);
      c.index = r.at("index").get<std::size_t>();
      c.raw_text = r.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidFormat, path.string() + ": " + e.what());
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyCorpus, path.string() + " holds no chapters");
  return out;
}

StopwordSet stopwords_for(const PipelineConfig& cfg) {
  StopwordSet stops = cfg.english_stopwords ? StopwordSet::english() : StopwordSet{};
  for (const auto& f : cfg.stopword_files) stops.add_file(f);
  return stops;
}

void stage_dtm(const PipelineConfig& cfg, std::ostream& log) {
  const auto chapters = load_chapters(cfg);
  const StopwordSet stops = stopwords_for(cfg);

  std::vector<TokenizedChapter> tokenized;
  tokenized.reserve(chapters.size());
  for (const auto& c : chapters) tokenized.push_back(clean_and_tokenize(c, stops));

  std::vector<TokenizedChapter> dropped;
  tokenized = drop_short_chapters(std::move(tokenized), cfg.min_tokens, &dropped);
  std::vector<ojson> dropped_records;
  for (const auto& d : dropped) {
    log << "warning: dropped chapter " << row_name({d.book, d.index}) << " (" << d.tokens.size()
        << " tokens, minimum " << cfg.min_tokens << ")\n";
    dropped_records.push_back({{"book", label_id(d.book)}, {"index", d.index}, {"tokens", d.tokens.size()}});
  }
  if (tokenized.empty()) throw Error(ErrorCode::EmptyCorpus, "every chapter was below min_tokens");

  const auto vocab = vocabulary(tokenized, cfg.min_df);
  const DocTermMatrix dtm = build_dtm(tokenized, vocab, cfg.weighting);
  const fs::path dir = cfg.out_dir / artifact::kDtmDir;
  write_dtm(dtm, dir);
  write_text_file(dir / "dropped.jsonl", jsonl(dropped_records));

  ojson stats;
  stats["weighting"] = to_string(dtm.weighting);
  stats["n"] = dtm.n();
  stats["p"] = dtm.p();
  stats["nnz"] = dtm.nnz();
  stats["sparsity"] = sparsity(dtm);
  stats["dropped_chapters"] = dropped.size();
  ojson per_book = ojson::object();
  for (BookLabel b : dtm.books()) per_book[std::string(label_id(b))] = dtm.rows_of(b).size();
  stats["chapters_per_book"] = std::move(per_book);
  write_text_file(cfg.out_dir / artifact::kDtmStats, stats.dump(2) + "\n");
  log << "dtm: " << dtm.n() << " chapters x " << dtm.p() << " terms, sparsity "
      << format_double(sparsity(dtm)) << "\n";
}

// ---- dist ----

void stage_dist(const PipelineConfig& cfg, std::ostream& log) {
  const DocTermMatrix dtm = load_dtm(cfg);
  const fs::path dir = cfg.out_dir / "dist";
  ojson stats;
  stats["measures"] = ojson::array();
  for (Measure m : cfg.measures) {
    const DistanceMatrix all = pairwise_distances(dtm, m, {}, cfg.threads);
    for (BookLabel b : dtm.books()) {
      const DistanceMatrix within = within_book_matrix(dtm, b, m, cfg.threads);
      const fs::path stem = dir / "within" / std::string(to_string(m)) / std::string(abbreviation(b));
      write_text_file(fs::path(stem).replace_extension(".csv"), distance_matrix_csv(within));
      write_text_file(fs::path(stem).replace_extension(".jsonl"), distance_matrix_jsonl(within));
    }
    if (dtm.books().size() >= 2) {
      for (Aggregator a : cfg.aggregators) {
        const BookDistanceMatrix delta = between_book_matrix(all, a);
        const std::string name = std::string(to_string(m)) + "_" + std::string(to_string(a));
        write_text_file(dir / "between" / (name + ".csv"), book_matrix_csv(delta));
        write_text_file(dir / "between" / (name + ".jsonl"), book_matrix_jsonl(delta));
      }
    } else {
      log << "warning: fewer than two books; between-book matrices skipped\n";
    }
    stats["measures"].push_back({{"measure", to_string(m)}, {"zero_vector_pairs", all.zero_vector_pairs}});
    if (all.zero_vector_pairs > 0) {
      log << "warning: " << to_string(m) << ": " << all.zero_vector_pairs
          << " chapter pairs involve an all-zero row\n";
    }
  }
  write_text_file(cfg.out_dir / artifact::kDistStats, stats.dump(2) + "\n");
  log << "dist: " << cfg.measures.size() << " measures x " << cfg.aggregators.size() << " aggregators\n";
}

// ---- cluster ----

void stage_cluster(const PipelineConfig& cfg, std::ostream& log) {
  const DocTermMatrix dtm = load_dtm(cfg);
  const fs::path dir = cfg.out_dir / "cluster";
  KMeansOptions base;
  base.measure = cfg.cluster_measure;
  base.seed = stage_seeds(cfg.seed).kmeans;
  base.max_iter = cfg.max_iter;
  base.tol = cfg.tol;
  base.restarts = cfg.restarts;
  base.threads = cfg.threads;
  const auto sweep = sweep_k(dtm, cfg.k_min, cfg.k_max, base);

  ojson summary;
  summary["measure"] = to_string(cfg.cluster_measure);
  summary["results"] = ojson::array();
  for (const auto& r : sweep) {
    const fs::path kdir = dir / ("k" + std::to_string(r.k));
    write_text_file(kdir / "graph.dot", graph_dot(r.graph));
    write_text_file(kdir / "graph.json", graph_json(r.graph));
    write_text_file(kdir / "partition.json", partition_json(r.partition, dtm.row_labels));

    ojson item;
    item["k"] = r.k;
    item["objective"] = r.partition.objective;
    item["plain_objective"] = r.partition.plain_objective;
    item["iterations"] = r.partition.iterations;
    item["restart"] = r.partition.restart;
    ojson strongest = nullptr;
    const std::size_t m = r.graph.nodes.size();
    double best = -1;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        if (r.graph.at(a, b) > best) {
          best = r.graph.at(a, b);
          strongest = {{"a", abbreviation(r.graph.nodes[a])}, {"b", abbreviation(r.graph.nodes[b])},
                       {"weight", best}};
        }
      }
    }
    item["strongest_edge"] = std::move(strongest);
    summary["results"].push_back(std::move(item));
  }

  if (dtm.books().size() >= 2) {
    const BookDistanceMatrix delta =
        between_book_matrix(dtm, cfg.dendrogram_measure, cfg.dendrogram_aggregator, cfg.threads);
    const Dendrogram d = book_dendrogram(delta);
    write_text_file(dir / "dendrogram.nwk", to_newick(d) + "\n");
    write_text_file(dir / "dendrogram.json", dendrogram_json(d));
    summary["dendrogram"] = {{"measure", to_string(cfg.dendrogram_measure)},
                             {"aggregator", to_string(cfg.dendrogram_aggregator)},
                             {"newick", to_newick(d)}};
  }
  write_text_file(cfg.out_dir / artifact::kSweep, summary.dump(2) + "\n");
  log << "cluster: k=" << cfg.k_min << ".." << cfg.k_max << " with " << to_string(cfg.cluster_measure) << "\n";
}

// ---- classify ----

void stage_classify(const PipelineConfig& cfg, std::ostream& log) {
  const DocTermMatrix dtm = load_dtm(cfg);
  const StageSeeds seeds = stage_seeds(cfg.seed);
  SplitSpec split_spec{cfg.train_fraction, seeds.split, cfg.stratified};

  std::vector<ClassifierSpec> specs;
  for (ClassifierKind kind : cfg.classifiers) {
    ClassifierSpec s;
    s.kind = kind;
    s.knn = cfg.knn;
    s.svm = cfg.svm;
    s.forest = cfg.forest;
    s.seed = kind == ClassifierKind::Knn ? seeds.knn : kind == ClassifierKind::SvmLinear ? seeds.svm : seeds.forest;
    specs.push_back(s);
  }
  const BenchmarkReport report = benchmark(dtm, split_spec, specs, cfg.threads);
  const fs::path dir = cfg.out_dir / "classify";
  write_text_file(cfg.out_dir / artifact::kClassifyReport, benchmark_json(report, dtm));
  for (const auto& r : report.results) {
    write_text_file(dir / ("confusion_" + std::string(to_string(r.spec.kind)) + ".csv"),
                    confusion_csv(r.confusion));
    log << "classify: " << to_string(r.spec.kind) << " accuracy " << format_double(r.confusion.accuracy)
        << " (" << r.confusion.trace << "/" << r.confusion.total << ")\n";
  }
}

// ---- report ----

// Reads a long-form book matrix back as (a, b) -> value.
std::optional<std::pair<std::pair<std::string, std::string>, double>> min_off_diagonal(const fs::path& path) {
  std::optional<std::pair<std::pair<std::string, std::string>, double>> best;
  for (const auto& r : read_jsonl(path)) {
    const auto a = r.at("row").get<std::string>();
    const auto b = r.at("col").get<std::string>();
    if (a == b || r.at("value").is_null()) continue;
    const double v = r.at("value").get<double>();
    if (!best || v < best->second) best = {{a, b}, v};
  }
  return best;
}

bool same_pair(const std::string& a, const std::string& b, BookLabel x, BookLabel y) {
  return (a == abbreviation(x) && b == abbreviation(y)) || (a == abbreviation(y) && b == abbreviation(x));
}

void stage_report(const PipelineConfig& cfg, std::ostream& log) {
  const fs::path out = cfg.out_dir;
  for (const auto& p : {artifact::kManifest, artifact::kDtmStats, artifact::kDistStats, artifact::kSweep,
                        artifact::kClassifyReport}) {
    require(out / p);
  }
  const auto manifest = read_jsonl(out / artifact::kManifest);
  const ojson dtm_stats = read_json(out / artifact::kDtmStats);
  const ojson dist_stats = read_json(out / artifact::kDistStats);
  const ojson sweep = read_json(out / artifact::kSweep);
  const ojson classify = read_json(out / artifact::kClassifyReport);
  const StageSeeds seeds = stage_seeds(cfg.seed);

  ojson s;
  s["schema"] = "scriptsim-summary";
  s["schema_version"] = kSummarySchemaVersion;
  s["version"] = kVersion;
  s["seeds"] = {{"base", cfg.seed},   {"split", seeds.split}, {"kmeans", seeds.kmeans},
                {"knn", seeds.knn}, {"svm", seeds.svm},     {"forest", seeds.forest}};
  s["settings"] = {{"weighting", dtm_stats.at("weighting")},
                   {"min_tokens", cfg.min_tokens},
                   {"min_df", cfg.min_df},
                   {"cluster_measure", to_string(cfg.cluster_measure)},
                   {"k_min", cfg.k_min},
                   {"k_max", cfg.k_max}};

  ojson chapters = ojson::object();
  for (const auto& r : manifest) {
    const std::string id = r.at("book").get<std::string>();
    const auto name = std::string(display_name(*parse_book_label(id)));
    if (!chapters.contains(name)) chapters[name] = {{"ingested", 0}, {"kept", 0}};
    chapters[name]["ingested"] = chapters[name]["ingested"].get<std::size_t>() + 1;
  }
  for (const auto& [id, kept] : dtm_stats.at("chapters_per_book").items()) {
    const auto name = std::string(display_name(*parse_book_label(id)));
    chapters[name]["kept"] = kept;
  }
  s["chapters"] = std::move(chapters);

  const double sp = dtm_stats.at("sparsity").get<double>();
  s["dtm"] = {{"n", dtm_stats.at("n")},
              {"p", dtm_stats.at("p")},
              {"nnz", dtm_stats.at("nnz")},
              {"sparsity", sp},
              {"sparsity_above_0_8", sp > 0.8},
              {"dropped_chapters", dtm_stats.at("dropped_chapters")}};

  std::size_t zero_pairs = 0;
  for (const auto& m : dist_stats.at("measures")) {
    if (m.at("measure") == "cosine") zero_pairs = m.at("zero_vector_pairs").get<std::size_t>();
  }
  s["cosine_zero_vector_pairs"] = zero_pairs;
  s["cosine_zero_vector_policy_used"] = zero_pairs > 0;

  ojson accuracies = ojson::object();
  for (const auto& c : classify.at("classifiers")) {
    accuracies[c.at("classifier").get<std::string>()] = {
        {"accuracy", c.at("accuracy")}, {"trace", c.at("trace")}, {"total", c.at("total")}};
  }
  s["classifiers"] = accuracies;

  ojson clusters = ojson::array();
  for (const auto& r : sweep.at("results")) {
    clusters.push_back({{"k", r.at("k")}, {"objective", r.at("objective")}, {"strongest_edge", r.at("strongest_edge")}});
  }
  s["clusters"] = std::move(clusters);

  // Qualitative checks against the published eight-book results.
  ojson checks;
  {
    ojson c;
    if (accuracies.contains("knn") && accuracies.contains("svm-linear") && accuracies.contains("random-forest")) {
      const double knn = accuracies["knn"]["accuracy"].get<double>();
      const double svm = accuracies["svm-linear"]["accuracy"].get<double>();
      const double forest = accuracies["random-forest"]["accuracy"].get<double>();
      c["status"] = forest > svm && svm > knn ? "pass" : "fail";
      c["values"] = {{"random-forest", forest}, {"svm-linear", svm}, {"knn", knn}};
    } else {
      c["status"] = "not-applicable";
    }
    c["expected"] = "random-forest > svm-linear > knn";
    checks["accuracy_ordering"] = std::move(c);
  }
  {
    ojson c;
    c["expected"] = "Upd-Tao";
    const fs::path delta = out / "dist" / "between" / "euclidean_median.jsonl";
    if (fs::exists(delta)) {
      const auto best = min_off_diagonal(delta);
      if (best) {
        c["status"] = same_pair(best->first.first, best->first.second, BookLabel::Upanishad, BookLabel::TaoTeChing)
                          ? "pass"
                          : "fail";
        c["pair"] = {best->first.first, best->first.second};
        c["value"] = best->second;
      } else {
        c["status"] = "not-applicable";
      }
    } else {
      c["status"] = "not-applicable";
    }
    checks["min_delta_pair"] = std::move(c);
  }
  {
    ojson c;
    c["expected"] = "Upd-Tao";
    c["status"] = "not-applicable";
    for (const auto& r : sweep.at("results")) {
      if (r.at("k") != 7 || r.at("strongest_edge").is_null()) continue;
      const auto& e = r.at("strongest_edge");
      const auto a = e.at("a").get<std::string>();
      const auto b = e.at("b").get<std::string>();
      c["status"] = same_pair(a, b, BookLabel::Upanishad, BookLabel::TaoTeChing) ? "pass" : "fail";
      c["pair"] = {a, b};
      c["weight"] = e.at("weight");
      // weight of the expected pair, for comparison
      const ojson graph = read_json(out / "cluster" / "k7" / "graph.json");
      for (const auto& ge : graph.at("edges")) {
        if (same_pair(ge.at("a").get<std::string>(), ge.at("b").get<std::string>(), BookLabel::Upanishad,
                      BookLabel::TaoTeChing)) {
          c["expected_pair_weight"] = ge.at("weight");
        }
      }
    }
    checks["k7_strongest_edge"] = std::move(c);
  }
  s["reproduction"] = std::move(checks);

  write_text_file(out / artifact::kSummary, s.dump(2) + "\n");
  log << "report: wrote " << (out / artifact::kSummary).string() << "\n";
}

void dispatch(Stage stage, const PipelineConfig& cfg, std::ostream& log) {
  switch (stage) {
    case Stage::Ingest: stage_ingest(cfg, log); break;
    case Stage::Dtm: stage_dtm(cfg, log); break;
    case Stage::Dist: stage_dist(cfg, log); break;
    case Stage::Cluster: stage_cluster(cfg, log); break;
    case Stage::Classify: stage_classify(cfg, log); break;
    case Stage::Report: stage_report(cfg, log); break;
    case Stage::Run: break;
  }
}

}  // namespace

void run_stage(Stage stage, const PipelineConfig& cfg, std::ostream& log) {
  if (stage == Stage::Run) {
    for (Stage s : {Stage::Ingest, Stage::Dtm, Stage::Dist, Stage::Cluster, Stage::Classify, Stage::Report}) {
      run_stage(s, cfg, log);
    }
    return;
  }
  try {
    dispatch(stage, cfg, log);
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const nlohmann::json::exception& e) {
    throw StageError(stage, Error(ErrorCode::InvalidFormat, e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(stage, Error(ErrorCode::IoError, e.what()));
  }
}

}  // namespace scriptsim
