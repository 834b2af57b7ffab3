#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "caer/demonstrations.hpp"
#include "caer/embedding.hpp"
#include "caer/lvlm.hpp"
#include "caer/metrics.hpp"
#include "caer/parser.hpp"
#include "caer/prompt.hpp"
#include "caer/retrieval.hpp"

namespace caer {

// Bad configuration (invariant violations, unknown enum names). The CLI maps
// this to exit code 1 and everything else fatal to 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusPaths {
    std::string train_annotations;
    std::string val_annotations;
    std::string test_annotations;
    std::string vocab;
};

struct RunConfig {
    CorpusPaths corpus;
    RunSetting setting = RunSetting::zero_shot;
    std::size_t k = 0;
    RetrievalMode retrieval_mode = RetrievalMode::fused;
    Split candidate_source = Split::train;
    std::size_t candidate_n = 200;
    std::uint64_t seed = 0;
    EmbeddingProviderConfig embedding;
    LvlmEndpointConfig lvlm;
    std::string output_dir;
    int max_parallel = 4;
    // Abort once more than this many queries fail; unset keeps going.
    std::optional<std::size_t> max_failed_queries;
    // Reuse a saved demonstration index (e.g. one with generated rationales)
    // instead of sampling and embedding candidates.
    std::string index_path;
    bool save_bundles = false;
    bool macro_includes_zero_support = true;
};

RunConfig run_config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json run_config_json(const RunConfig& config);

// Reads a JSON config file and applies `--set key=value` overrides with
// dotted paths ("lvlm.kind=mock_canned", "k=4"). Values that parse as JSON
// scalars are typed; everything else is a string.
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// Throws ConfigError on invariant violations (zero_shot with k > 0, few-shot
// with k = 0, nonpositive parallelism).
void validate(const RunConfig& config);

struct RunReport {
    RunConfig config;
    MetricsReport metrics;
    std::vector<PredictionRecord> predictions;  // test corpus order
    // Per query, the selected candidate indices, most similar first.
    std::vector<std::vector<std::size_t>> demonstrations;
    std::map<std::string, std::size_t> oov_frequency;
    std::size_t failed_queries = 0;
    double total_ms = 0.0;  // wall clock; kept out of the persisted report
};

// Injection seam: tests swap in scripted providers and backends. The backend
// factory receives the demonstration index so mock_nearest_demo can render
// its answers.
struct RunDeps {
    std::shared_ptr<EmbeddingProvider> provider;
    std::function<std::shared_ptr<LvlmBackend>(std::shared_ptr<const DemonstrationIndex>)>
        make_backend;
};

RunDeps deps_from_config(const RunConfig& config);

// Full pipeline: per test agent embed contexts, rank candidates, pick top-k
// (never from the query's own image), assemble the prompt, complete, parse;
// then score. Per-query failures downgrade to parse_ok=false and the run
// continues. Artifacts land in config.output_dir when it is set.
RunReport run(const RunConfig& config, const RunDeps& deps);
RunReport run(const RunConfig& config);

// Same, against an already loaded test corpus and demonstration index.
RunReport run_with_index(const RunConfig& config, const RunDeps& deps, const Corpus& test,
                         std::shared_ptr<const DemonstrationIndex> index);

// One report per k (k=0 drops to zero-shot); the demonstration index and the
// embedding cache are shared across the sweep. Artifacts go to
// <output_dir>/shots_k<k>/.
std::vector<RunReport> sweep_shots(const RunConfig& config, const std::vector<std::size_t>& ks,
                                   const RunDeps& deps);

// One report per retrieval mode at fixed k (config.k, defaulting to 6 when
// unset). Artifacts go to <output_dir>/mode_<name>/.
std::vector<RunReport> sweep_retrieval(const RunConfig& config,
                                       const std::vector<RetrievalMode>& modes,
                                       const RunDeps& deps);

// config.json, predictions.jsonl (one record per query, corpus order, with a
// "demonstrations" field), report.json + report.txt (no timing, so reruns are
// byte-identical), timing.json, and index.jsonl when an index was used.
void persist_report(const RunReport& report, const std::string& out_dir,
                    const DemonstrationIndex* index = nullptr);

// Joins predictions to ground truth by (image_id, person_id) and scores.
// parse_ok=false counts as an empty prediction regardless of record content.
MetricsReport score_predictions(const Corpus& corpus,
                                const std::vector<PredictionRecord>& predictions,
                                bool macro_includes_zero_support = true);

std::vector<PredictionRecord> load_predictions(const std::string& path,
                                               const LabelVocabulary& vocab);

}  // namespace caer
