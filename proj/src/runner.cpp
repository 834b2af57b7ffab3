#include "caer/runner.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "caer/dataset.hpp"
#include "caer/image_io.hpp"

namespace caer {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json corpus_paths_json(const CorpusPaths& paths) {
    return json{
        {"train_annotations", paths.train_annotations},
        {"val_annotations", paths.val_annotations},
        {"test_annotations", paths.test_annotations},
        {"vocab", paths.vocab},
    };
}

json embedding_config_json(const EmbeddingProviderConfig& c) {
    return json{
        {"kind", embedding_kind_name(c.kind)},
        {"endpoint_url", c.endpoint_url},
        {"cache_path", c.cache_path},
        {"dim", c.declared_dim},
        {"timeout_ms", c.timeout.count()},
        {"max_retries", c.max_retries},
    };
}

json lvlm_config_json(const LvlmEndpointConfig& c) {
    return json{
        {"kind", lvlm_kind_name(c.kind)},
        {"base_url", c.base_url},
        {"model_id", c.model_id},
        {"timeout_ms", c.timeout.count()},
        {"max_retries", c.max_retries},
        {"max_parallel", c.max_parallel},
        {"temperature", c.temperature},
        {"max_tokens", c.max_tokens},
        {"canned_response", c.canned_response},
    };
}

template <typename F>
auto config_field(const char* key, F&& get) {
    try {
        return get();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("corpus")) {
        const json& corpus = j.at("corpus");
        c.corpus.train_annotations = corpus.value("train_annotations", "");
        c.corpus.val_annotations = corpus.value("val_annotations", "");
        c.corpus.test_annotations = corpus.value("test_annotations", "");
        c.corpus.vocab = corpus.value("vocab", "");
    }
    c.setting = config_field("setting", [&] {
        return run_setting_from_name(j.value("setting", "zero_shot"));
    });
    c.k = config_field("k", [&] { return j.value("k", std::size_t{0}); });
    c.retrieval_mode = config_field("retrieval_mode", [&] {
        return retrieval_mode_from_name(j.value("retrieval_mode", "fused"));
    });
    c.candidate_source = config_field("candidate_source", [&] {
        return split_from_name(j.value("candidate_source", "train"));
    });
    c.candidate_n = config_field("candidate_n", [&] {
        return j.value("candidate_n", std::size_t{200});
    });
    c.seed = config_field("seed", [&] { return j.value("seed", std::uint64_t{0}); });
    if (j.contains("embedding")) {
        const json& e = j.at("embedding");
        c.embedding.kind = config_field("embedding.kind", [&] {
            return embedding_kind_from_name(e.value("kind", "hash"));
        });
        c.embedding.endpoint_url = e.value("endpoint_url", "");
        c.embedding.cache_path = e.value("cache_path", "");
        c.embedding.declared_dim = e.value("dim", std::size_t{64});
        c.embedding.timeout = std::chrono::milliseconds(e.value("timeout_ms", 30000));
        c.embedding.max_retries = e.value("max_retries", 3);
    }
    if (j.contains("lvlm")) {
        const json& l = j.at("lvlm");
        c.lvlm.kind = config_field("lvlm.kind", [&] {
            return lvlm_kind_from_name(l.value("kind", "http"));
        });
        c.lvlm.base_url = l.value("base_url", "");
        c.lvlm.model_id = l.value("model_id", "");
        c.lvlm.timeout = std::chrono::milliseconds(l.value("timeout_ms", 120000));
        c.lvlm.max_retries = l.value("max_retries", 3);
        c.lvlm.max_parallel = l.value("max_parallel", 4);
        c.lvlm.temperature = l.value("temperature", 0.0);
        c.lvlm.max_tokens = l.value("max_tokens", 512);
        c.lvlm.canned_response = l.value("canned_response", "");
    }
    c.output_dir = j.value("output_dir", "");
    c.max_parallel = j.value("max_parallel", 4);
    if (j.contains("max_failed_queries") && !j.at("max_failed_queries").is_null()) {
        c.max_failed_queries = j.at("max_failed_queries").get<std::size_t>();
    }
    c.index_path = j.value("index_path", "");
    c.save_bundles = j.value("save_bundles", false);
    c.macro_includes_zero_support = j.value("macro_includes_zero_support", true);
    return c;
}

json run_config_json(const RunConfig& c) {
    json j = {
        {"corpus", corpus_paths_json(c.corpus)},
        {"setting", run_setting_name(c.setting)},
        {"k", c.k},
        {"retrieval_mode", retrieval_mode_name(c.retrieval_mode)},
        {"candidate_source", split_name(c.candidate_source)},
        {"candidate_n", c.candidate_n},
        {"seed", c.seed},
        {"embedding", embedding_config_json(c.embedding)},
        {"lvlm", lvlm_config_json(c.lvlm)},
        {"output_dir", c.output_dir},
        {"max_parallel", c.max_parallel},
        {"max_failed_queries", nullptr},
        {"index_path", c.index_path},
        {"save_bundles", c.save_bundles},
        {"macro_includes_zero_support", c.macro_includes_zero_support},
    };
    if (c.max_failed_queries) j["max_failed_queries"] = *c.max_failed_queries;
    return j;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    for (const auto& override_expr : overrides) {
        auto eq = override_expr.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override must look like key=value: " + override_expr);
        }
        std::string key = override_expr.substr(0, eq);
        std::string value = override_expr.substr(eq + 1);
        json typed;
        try {
            typed = json::parse(value);
            if (!typed.is_primitive()) typed = value;  // arrays/objects stay strings
        } catch (const json::exception&) {
            typed = value;
        }
        json* node = &j;
        std::size_t start = 0;
        while (true) {
            auto dot = key.find('.', start);
            std::string part = key.substr(start, dot - start);
            if (part.empty()) throw ConfigError("bad override key: " + key);
            if (dot == std::string::npos) {
                (*node)[part] = typed;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
    return run_config_from_json(j);
}

void validate(const RunConfig& config) {
    if (config.setting == RunSetting::zero_shot && config.k != 0) {
        throw ConfigError("zero_shot requires k=0, got k=" + std::to_string(config.k));
    }
    if (config.setting != RunSetting::zero_shot && config.k == 0) {
        throw ConfigError(run_setting_name(config.setting) + " requires k >= 1");
    }
    if (config.max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
    if (config.embedding.declared_dim == 0) throw ConfigError("embedding dim must be >= 1");
    if (config.corpus.test_annotations.empty()) {
        throw ConfigError("corpus.test_annotations is required");
    }
    if (config.corpus.vocab.empty()) throw ConfigError("corpus.vocab is required");
}

RunDeps deps_from_config(const RunConfig& config) {
    RunDeps deps;
    deps.provider = make_provider(config.embedding);
    LvlmEndpointConfig lvlm = config.lvlm;
    deps.make_backend = [lvlm](std::shared_ptr<const DemonstrationIndex> index)
        -> std::shared_ptr<LvlmBackend> {
        switch (lvlm.kind) {
            case LvlmKind::http: return std::make_shared<HttpLvlmClient>(lvlm);
            case LvlmKind::mock_nearest:
                return std::make_shared<NearestDemoMock>(std::move(index),
                                                         lvlm.canned_response);
            case LvlmKind::mock_canned:
                return std::make_shared<CannedLvlm>(lvlm.canned_response);
        }
        throw std::logic_error("unknown LvlmKind");
    };
    return deps;
}

namespace {

struct QueryOutcome {
    PredictionRecord prediction;
    std::vector<std::size_t> selected;
    json bundle_debug;
    bool failed = false;
    std::string error;
};

// Demo images appear in many prompts; decode and annotate each at most once.
class AnnotatedDemoCache {
  public:
    explicit AnnotatedDemoCache(const DemonstrationIndex& index)
        : index_(index), cache_(index.size()) {}

    std::shared_ptr<const ContextImage> get(std::size_t i) {
        {
            std::lock_guard lock(mutex_);
            if (cache_[i]) return cache_[i];
        }
        const AnnotatedPerson& agent = index_.records[i].agent;
        Image image = load_image(agent.image_path);
        auto annotated = std::make_shared<const ContextImage>(annotate_target(
            image, agent.bbox, agent.source(), default_stroke(image)));
        std::lock_guard lock(mutex_);
        if (!cache_[i]) cache_[i] = std::move(annotated);
        return cache_[i];
    }

  private:
    const DemonstrationIndex& index_;
    std::vector<std::shared_ptr<const ContextImage>> cache_;
    std::mutex mutex_;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

RunReport run_with_index(const RunConfig& config, const RunDeps& deps, const Corpus& test,
                         std::shared_ptr<const DemonstrationIndex> index) {
    validate(config);
    if (!deps.provider || !deps.make_backend) {
        throw ConfigError("run dependencies are incomplete");
    }
    if (!index) throw ConfigError("run_with_index needs an index (may be empty)");
    if (config.setting != RunSetting::zero_shot && config.k > index->size()) {
        throw ConfigError("k=" + std::to_string(config.k) + " exceeds the candidate count " +
                          std::to_string(index->size()));
    }
    if (config.setting == RunSetting::few_shot_cot && !index->all_have_rationales()) {
        throw ConfigError("few_shot_cot requires an index with rationales; run gen-rationales first");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const LabelVocabulary& vocab = test.vocabulary;
    const std::vector<ContextEmbeddings> candidate_embeddings = index->embeddings();
    const bool cot = config.setting == RunSetting::few_shot_cot;

    std::shared_ptr<LvlmBackend> backend = deps.make_backend(index);
    AnnotatedDemoCache demo_cache(*index);

    const std::size_t n = test.size();
    std::vector<QueryOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};

    auto over_threshold = [&] {
        return config.max_failed_queries &&
               failures.load() > *config.max_failed_queries;
    };

    auto handle_query = [&](std::size_t i) {
        const AnnotatedPerson& agent = test.persons[i];
        QueryOutcome& out = outcomes[i];
        try {
            Image image = load_image(agent.image_path);
            ContextEmbeddings query = embed_agent(*deps.provider, agent, image);

            if (config.k > 0) {
                Ranking ranking = rank_candidates(query, candidate_embeddings,
                                                  config.retrieval_mode, config.seed);
                out.selected = top_k(ranking, config.k, agent.image_id);
            }

            std::vector<std::vector<PromptSegment>> demos;
            demos.reserve(out.selected.size());
            for (std::size_t idx : out.selected) {
                demos.push_back(build_demonstration(index->records[idx], vocab, cot,
                                                    demo_cache.get(idx)));
            }

            auto test_image = std::make_shared<const ContextImage>(annotate_target(
                image, agent.bbox, agent.source(), default_stroke(image)));
            BundleMeta meta;
            meta.query = agent.source();
            meta.setting = out.selected.empty() ? RunSetting::zero_shot : config.setting;
            meta.k = out.selected.size();
            meta.mode = config.retrieval_mode;
            meta.selected_indices = out.selected;
            PromptBundle bundle = assemble_input(
                build_instruction(vocab, out.selected.empty()), demos, test_image,
                std::move(meta));
            if (config.save_bundles) out.bundle_debug = bundle_debug_json(bundle);

            Completion completion = backend->complete(bundle);
            out.prediction = parse_labels(completion.raw_text, vocab);
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
            out.prediction = PredictionRecord{};
            failures.fetch_add(1);
        }
        out.prediction.query = agent.source();
    };

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || over_threshold()) break;
            handle_query(i);
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.max_parallel), std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (over_threshold()) {
        throw std::runtime_error("aborting run: " + std::to_string(failures.load()) +
                                 " failed queries exceed max_failed_queries=" +
                                 std::to_string(*config.max_failed_queries));
    }

    RunReport report;
    report.config = config;
    report.failed_queries = failures.load();

    ConfusionCounts counts(vocab.size());
    for (std::size_t i = 0; i < n; ++i) {
        const QueryOutcome& out = outcomes[i];
        const LabelSet empty;
        accumulate(test.persons[i].labels,
                   out.prediction.parse_ok ? out.prediction.predicted : empty, counts);
        report.predictions.push_back(out.prediction);
        report.demonstrations.push_back(out.selected);
        for (const auto& word : out.prediction.oov_labels) ++report.oov_frequency[word];
    }
    report.metrics = finalize(counts, config.macro_includes_zero_support);
    report.total_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

    if (!config.output_dir.empty()) {
        persist_report(report, config.output_dir, index->size() > 0 ? index.get() : nullptr);
        if (config.save_bundles) {
            std::string lines;
            for (const auto& out : outcomes) lines += out.bundle_debug.dump() + "\n";
            write_file(fs::path(config.output_dir) / "bundles.jsonl", lines);
        }
    }
    return report;
}

namespace {

Corpus load_candidate_corpus(const RunConfig& config) {
    const std::string& path = config.candidate_source == Split::val
                                  ? config.corpus.val_annotations
                                  : config.corpus.train_annotations;
    if (path.empty()) {
        throw ConfigError("candidate_source=" + split_name(config.candidate_source) +
                          " but the matching annotations path is empty");
    }
    return load_corpus(path, config.corpus.vocab, config.candidate_source);
}

std::shared_ptr<DemonstrationIndex> prepare_index(const RunConfig& config,
                                                  const RunDeps& deps,
                                                  const LabelVocabulary& vocab) {
    auto index = std::make_shared<DemonstrationIndex>();
    if (config.setting == RunSetting::zero_shot) {
        index->vocabulary = vocab;
        return index;
    }
    if (!config.index_path.empty()) {
        *index = load_index(config.index_path);
        if (!(index->vocabulary == vocab)) {
            throw ConfigError("index vocabulary does not match corpus vocabulary");
        }
        return index;
    }
    *index = build_index(load_candidate_corpus(config), config.candidate_n, config.seed,
                         *deps.provider);
    return index;
}

}  // namespace

RunReport run(const RunConfig& config, const RunDeps& deps) {
    validate(config);
    Corpus test = load_corpus(config.corpus.test_annotations, config.corpus.vocab, Split::test);
    auto index = prepare_index(config, deps, test.vocabulary);
    return run_with_index(config, deps, test, index);
}

RunReport run(const RunConfig& config) { return run(config, deps_from_config(config)); }

std::vector<RunReport> sweep_shots(const RunConfig& config, const std::vector<std::size_t>& ks,
                                   const RunDeps& deps) {
    if (ks.empty()) throw ConfigError("sweep-shots needs at least one k");
    RunSetting few = config.setting == RunSetting::zero_shot ? RunSetting::few_shot
                                                             : config.setting;
    Corpus test = load_corpus(config.corpus.test_annotations, config.corpus.vocab, Split::test);

    bool any_shots = false;
    std::size_t max_k = 0;
    for (std::size_t k : ks) {
        any_shots = any_shots || k > 0;
        max_k = std::max(max_k, k);
    }
    RunConfig index_config = config;
    index_config.setting = any_shots ? few : RunSetting::zero_shot;
    index_config.k = any_shots ? max_k : 0;
    auto index = prepare_index(index_config, deps, test.vocabulary);

    std::vector<RunReport> reports;
    for (std::size_t k : ks) {
        RunConfig sub = config;
        sub.k = k;
        sub.setting = k == 0 ? RunSetting::zero_shot : few;
        if (!config.output_dir.empty()) {
            sub.output_dir =
                (fs::path(config.output_dir) / ("shots_k" + std::to_string(k))).string();
        }
        reports.push_back(run_with_index(sub, deps, test, index));
    }
    return reports;
}

std::vector<RunReport> sweep_retrieval(const RunConfig& config,
                                       const std::vector<RetrievalMode>& modes,
                                       const RunDeps& deps) {
    if (modes.empty()) throw ConfigError("sweep-retrieval needs at least one mode");
    RunConfig base = config;
    if (base.setting == RunSetting::zero_shot) base.setting = RunSetting::few_shot;
    if (base.k == 0) base.k = 6;  // the shot count the retrieval comparison runs at
    Corpus test = load_corpus(base.corpus.test_annotations, base.corpus.vocab, Split::test);
    auto index = prepare_index(base, deps, test.vocabulary);

    std::vector<RunReport> reports;
    for (RetrievalMode mode : modes) {
        RunConfig sub = base;
        sub.retrieval_mode = mode;
        if (!config.output_dir.empty()) {
            sub.output_dir =
                (fs::path(config.output_dir) / ("mode_" + retrieval_mode_name(mode))).string();
        }
        reports.push_back(run_with_index(sub, deps, test, index));
    }
    return reports;
}

void persist_report(const RunReport& report, const std::string& out_dir,
                    const DemonstrationIndex* index) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    // The vocabulary travels with the config paths; reload it for rendering.
    LabelVocabulary render_vocab = load_vocabulary(report.config.corpus.vocab);

    write_file(dir / "config.json", run_config_json(report.config).dump(2) + "\n");

    std::string lines;
    for (std::size_t i = 0; i < report.predictions.size(); ++i) {
        json line = prediction_json(report.predictions[i], render_vocab);
        line["demonstrations"] = report.demonstrations[i];
        lines += line.dump() + "\n";
    }
    write_file(dir / "predictions.jsonl", lines);

    json rep = {
        {"n_queries", report.predictions.size()},
        {"failed_queries", report.failed_queries},
        {"setting", run_setting_name(report.config.setting)},
        {"k", report.config.k},
        {"retrieval_mode", retrieval_mode_name(report.config.retrieval_mode)},
        {"metrics", report_json(report.metrics, render_vocab)},
        {"oov_frequency", report.oov_frequency},
    };
    write_file(dir / "report.json", rep.dump(2) + "\n");
    write_file(dir / "report.txt", report_table(report.metrics, render_vocab));

    json timing = {{"total_ms", report.total_ms}};
    write_file(dir / "timing.json", timing.dump(2) + "\n");

    if (index && index->size() > 0) {
        save_index(*index, (dir / "index.jsonl").string());
    }
}

MetricsReport score_predictions(const Corpus& corpus,
                                const std::vector<PredictionRecord>& predictions,
                                bool macro_includes_zero_support) {
    std::map<std::pair<std::string, std::string>, const PredictionRecord*> by_query;
    for (const auto& p : predictions) {
        by_query[{p.query.image_id, p.query.person_id}] = &p;
    }
    ConfusionCounts counts(corpus.vocabulary.size());
    for (const auto& agent : corpus.persons) {
        auto it = by_query.find({agent.image_id, agent.person_id});
        if (it == by_query.end()) {
            throw std::runtime_error("no prediction for " + agent.source().str());
        }
        const PredictionRecord& p = *it->second;
        const LabelSet empty;
        accumulate(agent.labels, p.parse_ok ? p.predicted : empty, counts);
    }
    return finalize(counts, macro_includes_zero_support);
}

std::vector<PredictionRecord> load_predictions(const std::string& path,
                                               const LabelVocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read predictions file: " + path);
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(prediction_from_json(json::parse(line), vocab));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace caer
