#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scriptsim/pipeline.hpp"

namespace {

std::optional<unsigned> threads_from_env() {
  const char* v = std::getenv("SCRIPTSIM_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  unsigned n = 0;
  const std::string s(v);
  auto res = std::from_chars(s.data(), s.data() + s.size(), n);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || n == 0) {
    std::cerr << "warning: ignoring SCRIPTSIM_THREADS='" << s << "'\n";
    return std::nullopt;
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chapter-level text similarity, clustering and classification over a book corpus"};
  app.set_version_flag("--version", std::string(scriptsim::kVersion));

  std::string config_path;
  std::string out_dir;
  std::string stage_name;
  std::string positional_stage;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;

  app.add_option("command", positional_stage, "ingest | dtm | dist | cluster | classify | report | run")
      ->check(CLI::IsMember({"ingest", "dtm", "dist", "cluster", "classify", "report", "run"}));
  app.add_option("--stage", stage_name, "same as the positional stage")
      ->check(CLI::IsMember({"ingest", "dtm", "dist", "cluster", "classify", "report", "run"}));
  app.add_option("-c,--config", config_path, "INI config file")->required();
  app.add_option("-o,--out", out_dir, "output directory (overrides [pipeline] out)");
  app.add_option("--seed", seed, "base seed (overrides [pipeline] seed)");
  app.add_option("--threads", threads, "worker threads (default: SCRIPTSIM_THREADS, then [pipeline] threads)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  CLI11_PARSE(app, argc, argv);

  if (!stage_name.empty() && !positional_stage.empty() && stage_name != positional_stage) {
    std::cerr << "error: conflicting stages '" << positional_stage << "' and '" << stage_name << "'\n";
    return 2;
  }
  if (stage_name.empty()) stage_name = positional_stage.empty() ? "run" : positional_stage;

  scriptsim::PipelineConfig cfg;
  try {
    cfg = scriptsim::load_config(config_path);
  } catch (const scriptsim::Error& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed) cfg.seed = *seed;
  if (threads) {
    cfg.threads = *threads;
  } else if (auto env = threads_from_env()) {
    cfg.threads = *env;
  }

  std::ostream null_stream(nullptr);
  std::ostream& log = quiet ? null_stream : std::cerr;
  try {
    scriptsim::run_stage(scriptsim::parse_stage(stage_name), cfg, log);
  } catch (const scriptsim::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
