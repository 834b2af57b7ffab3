#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <fstream>

#include "caer/dataset.hpp"
#include "caer/runner.hpp"
#include "caer/synthetic.hpp"
#include "caer/util.hpp"

namespace {

struct ConfigArgs {
    std::string path;
    std::vector<std::string> overrides;

    caer::RunConfig load() const { return caer::load_run_config(path, overrides); }
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("-c,--config", args.path, "JSON run config")->required();
    cmd->add_option("--set", args.overrides,
                    "Override a config key, dotted path (e.g. --set lvlm.kind=mock_canned)");
}

void print_run_summary(const caer::RunReport& report) {
    std::cout << caer::run_setting_name(report.config.setting) << " k=" << report.config.k
              << " mode=" << caer::retrieval_mode_name(report.config.retrieval_mode) << ": "
              << report.predictions.size() << " queries, " << report.failed_queries
              << " failed\n";
    caer::LabelVocabulary vocab = caer::load_vocabulary(report.config.corpus.vocab);
    std::cout << caer::report_table(report.metrics, vocab);
    if (!report.config.output_dir.empty()) {
        std::cout << "artifacts: " << report.config.output_dir << "\n";
    }
}

std::vector<std::size_t> parse_ks(const std::string& csv) {
    std::vector<std::size_t> ks;
    for (const auto& part : caer::split(csv, ',')) {
        ks.push_back(static_cast<std::size_t>(std::stoull(caer::trim(part))));
    }
    return ks;
}

std::vector<caer::RetrievalMode> parse_modes(const std::string& csv) {
    std::vector<caer::RetrievalMode> modes;
    for (const auto& part : caer::split(csv, ',')) {
        modes.push_back(caer::retrieval_mode_from_name(caer::trim(part)));
    }
    return modes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free in-context pipeline for context-aware emotion recognition"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate an annotation file and vocabulary");
    struct {
        std::string annotations, vocab, split = "train", out;
    } ingest_args;
    ingest->add_option("--annotations", ingest_args.annotations, "JSONL annotations")->required();
    ingest->add_option("--vocab", ingest_args.vocab, "vocabulary file")->required();
    ingest->add_option("--split", ingest_args.split, "train|val|test");
    ingest->add_option("--out", ingest_args.out, "rewrite in canonical form to this path");
    ingest->callback([&] {
        caer::Corpus corpus = caer::load_corpus(ingest_args.annotations, ingest_args.vocab,
                                                caer::split_from_name(ingest_args.split));
        std::cout << corpus.size() << " agents, vocabulary '" << corpus.vocabulary.name()
                  << "' (" << corpus.vocabulary.size() << " labels, "
                  << (corpus.vocabulary.multi_label() ? "multi" : "single") << "-label)\n";
        if (!ingest_args.out.empty()) {
            caer::save_corpus(corpus, ingest_args.out);
            std::cout << "canonical copy: " << ingest_args.out << "\n";
        }
    });

    // embed
    auto* embed = app.add_subcommand("embed", "Warm the embedding cache for a config");
    ConfigArgs embed_config;
    add_config_options(embed, embed_config);
    embed->callback([&] {
        caer::RunConfig config = embed_config.load();
        caer::validate(config);
        auto provider = caer::make_provider(config.embedding);
        std::size_t agents = 0;
        if (config.setting != caer::RunSetting::zero_shot && config.index_path.empty()) {
            caer::Corpus candidates =
                caer::load_corpus(config.candidate_source == caer::Split::val
                                      ? config.corpus.val_annotations
                                      : config.corpus.train_annotations,
                                  config.corpus.vocab, config.candidate_source);
            for (const auto& agent :
                 caer::sample_candidates(candidates, config.candidate_n, config.seed)) {
                caer::embed_agent(*provider, agent);
                ++agents;
            }
        }
        caer::Corpus test = caer::load_corpus(config.corpus.test_annotations,
                                              config.corpus.vocab, caer::Split::test);
        for (const auto& agent : test.persons) {
            caer::embed_agent(*provider, agent);
            ++agents;
        }
        std::cout << "embedded " << agents << " agents (3 contexts each)\n";
    });

    // sample-candidates
    auto* sample = app.add_subcommand("sample-candidates",
                                      "Draw the candidate demonstration set");
    ConfigArgs sample_config;
    std::string sample_out;
    add_config_options(sample, sample_config);
    sample->add_option("--out", sample_out, "where to write the sampled agents (JSONL)");
    sample->callback([&] {
        caer::RunConfig config = sample_config.load();
        caer::Corpus candidates =
            caer::load_corpus(config.candidate_source == caer::Split::val
                                  ? config.corpus.val_annotations
                                  : config.corpus.train_annotations,
                              config.corpus.vocab, config.candidate_source);
        caer::Corpus sampled;
        sampled.vocabulary = candidates.vocabulary;
        sampled.split = candidates.split;
        sampled.persons =
            caer::sample_candidates(candidates, config.candidate_n, config.seed);
        std::string out = sample_out.empty()
                              ? (config.output_dir.empty() ? "candidates.jsonl"
                                                           : config.output_dir + "/candidates.jsonl")
                              : sample_out;
        caer::save_corpus(sampled, out);
        std::cout << "sampled " << sampled.size() << " candidates -> " << out << "\n";
    });

    // gen-rationales
    auto* gen = app.add_subcommand("gen-rationales",
                                   "Generate CoT rationales for the demonstration index");
    ConfigArgs gen_config;
    std::string gen_out;
    add_config_options(gen, gen_config);
    gen->add_option("--out", gen_out, "index output path (default: index_path or output_dir/index.jsonl)");
    gen->callback([&] {
        caer::RunConfig config = gen_config.load();
        auto deps = caer::deps_from_config(config);
        caer::DemonstrationIndex index;
        if (!config.index_path.empty()) {
            index = caer::load_index(config.index_path);
        } else {
            caer::Corpus candidates =
                caer::load_corpus(config.candidate_source == caer::Split::val
                                      ? config.corpus.val_annotations
                                      : config.corpus.train_annotations,
                                  config.corpus.vocab, config.candidate_source);
            index = caer::build_index(candidates, config.candidate_n, config.seed,
                                      *deps.provider);
        }
        auto backend = deps.make_backend(std::make_shared<caer::DemonstrationIndex>(index));
        std::size_t generated = caer::generate_rationales(index, *backend);
        std::string out = !gen_out.empty() ? gen_out
                          : !config.index_path.empty()
                              ? config.index_path
                              : (config.output_dir.empty() ? "index.jsonl"
                                                           : config.output_dir + "/index.jsonl");
        caer::save_index(index, out);
        std::cout << "generated " << generated << " rationales, index -> " << out << "\n";
    });

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute one full evaluation run");
    ConfigArgs run_config;
    add_config_options(run_cmd, run_config);
    run_cmd->callback([&] {
        caer::RunReport report = caer::run(run_config.load());
        print_run_summary(report);
    });

    // sweep-shots
    auto* shots = app.add_subcommand("sweep-shots", "Run the shot-count ablation");
    ConfigArgs shots_config;
    std::string ks_csv = "0,2,4,6,8,10,12,16";
    add_config_options(shots, shots_config);
    shots->add_option("--ks", ks_csv, "comma-separated shot counts");
    shots->callback([&] {
        caer::RunConfig config = shots_config.load();
        auto reports =
            caer::sweep_shots(config, parse_ks(ks_csv), caer::deps_from_config(config));
        for (const auto& report : reports) print_run_summary(report);
    });

    // sweep-retrieval
    auto* modes_cmd = app.add_subcommand("sweep-retrieval", "Run the retrieval-mode ablation");
    ConfigArgs modes_config;
    std::string modes_csv = "random,scene_only,person_only,overall,fused";
    add_config_options(modes_cmd, modes_config);
    modes_cmd->add_option("--modes", modes_csv, "comma-separated retrieval modes");
    modes_cmd->callback([&] {
        caer::RunConfig config = modes_config.load();
        auto reports = caer::sweep_retrieval(config, parse_modes(modes_csv),
                                             caer::deps_from_config(config));
        for (const auto& report : reports) print_run_summary(report);
    });

    // score
    auto* score = app.add_subcommand("score", "Re-score an existing predictions file");
    ConfigArgs score_config;
    std::string predictions_path;
    add_config_options(score, score_config);
    score->add_option("--predictions", predictions_path,
                      "predictions JSONL (default: output_dir/predictions.jsonl)");
    score->callback([&] {
        caer::RunConfig config = score_config.load();
        std::string path = predictions_path.empty()
                               ? config.output_dir + "/predictions.jsonl"
                               : predictions_path;
        caer::Corpus test = caer::load_corpus(config.corpus.test_annotations,
                                              config.corpus.vocab, caer::Split::test);
        auto predictions = caer::load_predictions(path, test.vocabulary);
        caer::MetricsReport metrics = caer::score_predictions(
            test, predictions, config.macro_includes_zero_support);
        std::cout << caer::report_table(metrics, test.vocabulary);
    });

    // make-fixture
    auto* fixture = app.add_subcommand("make-fixture",
                                       "Generate a synthetic dataset plus a ready-to-run config");
    caer::SyntheticSpec spec;
    fixture->add_option("--root", spec.root_dir, "output directory")->required();
    fixture->add_option("--n-train", spec.n_train, "training agents");
    fixture->add_option("--n-test", spec.n_test, "test agents");
    fixture->add_option("--width", spec.width, "image width");
    fixture->add_option("--height", spec.height, "image height");
    fixture->add_option("--seed", spec.seed, "generator seed");
    fixture->add_flag("--multi-label", spec.multi_label, "multi-label vocabulary");
    fixture->callback([&] {
        caer::SyntheticFixture paths = caer::make_fixture(spec);

        caer::RunConfig config;
        config.corpus.train_annotations = paths.train_annotations;
        config.corpus.test_annotations = paths.test_annotations;
        config.corpus.vocab = paths.vocab_path;
        config.setting = caer::RunSetting::few_shot;
        config.k = 2;
        config.candidate_n = std::min<std::size_t>(spec.n_train, 200);
        config.seed = spec.seed;
        config.embedding.kind = caer::EmbeddingProviderKind::hash;
        config.embedding.cache_path = spec.root_dir + "/embeddings.jsonl";
        config.lvlm.kind = caer::LvlmKind::mock_nearest;
        config.output_dir = spec.root_dir + "/out";
        std::string config_path = spec.root_dir + "/config.json";
        std::ofstream out(config_path, std::ios::binary);
        out << caer::run_config_json(config).dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write " + config_path);

        std::cout << "fixture ready:\n  " << paths.train_annotations << "\n  "
                  << paths.test_annotations << "\n  " << paths.vocab_path
                  << "\nconfig: " << config_path << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const caer::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
