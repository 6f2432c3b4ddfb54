#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scriptsim/classify.hpp"
#include "scriptsim/cluster.hpp"
#include "scriptsim/corpus.hpp"
#include "scriptsim/dtm.hpp"
#include "scriptsim/error.hpp"
#include "scriptsim/similarity.hpp"

namespace scriptsim {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr int kSummarySchemaVersion = 1;

struct BookSpec {
  BookLabel label{};
  std::filesystem::path path;
  SegRule rule;
};

struct PipelineConfig {
  std::vector<BookSpec> books;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  unsigned threads = 1;

  bool english_stopwords = true;
  std::vector<std::filesystem::path> stopword_files;
  std::size_t min_tokens = 5;
  std::size_t min_df = 1;
  Weighting weighting = Weighting::RawFrequency;

  std::vector<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
  std::vector<Aggregator> aggregators{std::begin(kAllAggregators), std::end(kAllAggregators)};

  Measure cluster_measure = Measure::Euclidean;
  std::size_t k_min = 2;
  std::size_t k_max = 7;
  std::size_t restarts = 10;
  std::size_t max_iter = 100;
  double tol = 1e-9;
  Measure dendrogram_measure = Measure::Euclidean;
  Aggregator dendrogram_aggregator = Aggregator::Median;

  double train_fraction = 0.7;
  bool stratified = true;
  std::vector<ClassifierKind> classifiers{ClassifierKind::Knn, ClassifierKind::SvmLinear,
                                          ClassifierKind::RandomForest};
  KnnParams knn;
  SvmParams svm;
  ForestParams forest;
};

// Seeds used by the randomized stages, all derived from the base seed.
struct StageSeeds {
  std::uint64_t split;
  std::uint64_t kmeans;
  std::uint64_t knn;
  std::uint64_t svm;
  std::uint64_t forest;
};
StageSeeds stage_seeds(std::uint64_t base);

// Reads an INI config. Relative paths are resolved against the directory
// of the config file. Throws InvalidConfig on unknown sections or keys and
// on malformed values, MissingFile when the file is absent.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

enum class Stage { Ingest, Dtm, Dist, Cluster, Classify, Report, Run };
std::string_view to_string(Stage s) noexcept;
Stage parse_stage(std::string_view text);

// Runs one stage; stages exchange data only through files under
// cfg.out_dir. Warnings and progress go to `log`. `Run` executes the six
// stages in order.
void run_stage(Stage stage, const PipelineConfig& cfg, std::ostream& log);

// Thrown by run_stage: the failing stage plus the underlying error code.
// what() reads "stage <name> failed: <Code>: <detail>".
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const Error& cause);
  Stage stage() const noexcept { return stage_; }
  ErrorCode code() const noexcept { return code_; }

 private:
  Stage stage_;
  ErrorCode code_;
};

// Stage artifact locations relative to the output directory.
namespace artifact {
inline const std::filesystem::path kManifest = "corpus/manifest.jsonl";
inline const std::filesystem::path kChapters = "corpus/chapters.jsonl";
inline const std::filesystem::path kDtmDir = "dtm";
inline const std::filesystem::path kDtmStats = "dtm/stats.json";
inline const std::filesystem::path kDistStats = "dist/stats.json";
inline const std::filesystem::path kSweep = "cluster/sweep.json";
inline const std::filesystem::path kClassifyReport = "classify/report.json";
inline const std::filesystem::path kSummary = "summary.json";
}  // namespace artifact

}  // namespace scriptsim
