#include "doctest.h"

#include <set>

#include "caer/dataset.hpp"
#include "support.hpp"

using namespace caer;
using caer::testing::TempDir;
using caer::testing::write_file;

namespace {

const char* kVocabDir = CAER_FIXTURE_DIR "/vocab";

std::string agent_line(const std::string& image, const std::string& person,
                       const std::string& labels, const std::string& bbox = "[1, 2, 5, 9]") {
    return "{\"image_id\": \"" + image + "\", \"image_path\": \"images/" + image +
           ".png\", \"person_id\": \"" + person + "\", \"bbox\": " + bbox +
           ", \"labels\": " + labels + "}\n";
}

}  // namespace

TEST_CASE("load_vocabulary reads the 8-label single-label file") {
    LabelVocabulary vocab = load_vocabulary(std::string(kVocabDir) + "/heco8.txt");
    CHECK(vocab.name() == "heco8");
    CHECK_FALSE(vocab.multi_label());
    CHECK(vocab.size() == 8);
    CHECK(vocab.label(0) == "Surprise");
    CHECK(vocab.label(7) == "Sadness");
    CHECK(vocab.index_of("peace") == std::size_t{3});
    CHECK_FALSE(vocab.index_of("Discomfort").has_value());
}

TEST_CASE("load_vocabulary reads the 26-label multi-label file") {
    LabelVocabulary vocab = load_vocabulary(std::string(kVocabDir) + "/emotic26.txt");
    CHECK(vocab.multi_label());
    CHECK(vocab.size() == 26);
    CHECK(vocab.index_of("Doubt/Confusion").has_value());
}

TEST_CASE("vocabulary files without the multi_label header are rejected") {
    TempDir dir("vocab_errors");
    write_file(dir.str("bad.txt"), "Happiness\nAnger\n");
    CHECK_THROWS_WITH_AS(load_vocabulary(dir.str("bad.txt")),
                         doctest::Contains("#multi_label"), std::runtime_error);

    write_file(dir.str("dup.txt"), "#multi_label=false\nAnger\nanger\n");
    CHECK_THROWS_AS(load_vocabulary(dir.str("dup.txt")), std::runtime_error);

    write_file(dir.str("empty.txt"), "#multi_label=true\n");
    CHECK_THROWS_AS(load_vocabulary(dir.str("empty.txt")), std::runtime_error);
}

TEST_CASE("load_corpus parses agents and validates against the vocabulary") {
    TempDir dir("corpus_load");
    write_file(dir.str("ann.jsonl"), agent_line("im1", "p0", "[\"Anger\"]") +
                                         agent_line("im1", "p1", "[\"Fear\", \"Sadness\"]") +
                                         agent_line("im2", "p0", "[\"Peace\"]"));
    Corpus corpus =
        load_corpus(dir.str("ann.jsonl"), std::string(kVocabDir) + "/heco8.txt", Split::test);

    REQUIRE(corpus.size() == 3);
    CHECK(corpus.split == Split::test);
    CHECK(corpus.persons[0].image_id == "im1");
    CHECK(corpus.persons[0].bbox == BoundingBox{1, 2, 5, 9});
    CHECK(corpus.persons[1].labels == LabelSet{6, 7});
    CHECK(corpus.persons[2].labels == LabelSet{3});
}

TEST_CASE("load_corpus reports the offending line") {
    TempDir dir("corpus_errors");
    const std::string vocab = std::string(kVocabDir) + "/heco8.txt";

    SUBCASE("zero-area bbox") {
        write_file(dir.str("a.jsonl"), agent_line("im1", "p0", "[\"Anger\"]") +
                                           agent_line("im2", "p0", "[\"Anger\"]", "[4, 2, 4, 9]"));
        CHECK_THROWS_WITH_AS(load_corpus(dir.str("a.jsonl"), vocab),
                             doctest::Contains("zero-area bbox"), std::runtime_error);
        try {
            load_corpus(dir.str("a.jsonl"), vocab);
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("unknown label") {
        write_file(dir.str("b.jsonl"), agent_line("im1", "p0", "[\"Discomfort\"]"));
        CHECK_THROWS_WITH_AS(load_corpus(dir.str("b.jsonl"), vocab),
                             doctest::Contains("Discomfort"), std::runtime_error);
    }
    SUBCASE("duplicate agent identity") {
        write_file(dir.str("c.jsonl"), agent_line("im1", "p0", "[\"Anger\"]") +
                                           agent_line("im1", "p0", "[\"Fear\"]"));
        CHECK_THROWS_AS(load_corpus(dir.str("c.jsonl"), vocab), std::runtime_error);
    }
    SUBCASE("malformed json") {
        write_file(dir.str("d.jsonl"), "{not json\n");
        CHECK_THROWS_AS(load_corpus(dir.str("d.jsonl"), vocab), std::runtime_error);
    }
}

TEST_CASE("save_corpus round-trips through load_corpus") {
    TempDir dir("corpus_roundtrip");
    write_file(dir.str("ann.jsonl"),
               agent_line("im1", "p0", "[\"Sadness\", \"Anger\"]") +
                   agent_line("im2", "p0", "[\"Surprise\"]", "[0, 0, 3, 3]"));
    const std::string vocab = std::string(kVocabDir) + "/heco8.txt";
    Corpus original = load_corpus(dir.str("ann.jsonl"), vocab, Split::val);

    save_corpus(original, dir.str("canonical.jsonl"));
    Corpus reloaded = load_corpus(dir.str("canonical.jsonl"), vocab, Split::val);

    CHECK(reloaded.persons == original.persons);
    CHECK(reloaded.vocabulary == original.vocabulary);
}

TEST_CASE("sample_candidates is a deterministic subset draw") {
    Corpus corpus;
    corpus.vocabulary = load_vocabulary(std::string(kVocabDir) + "/heco8.txt");
    for (int i = 0; i < 20; ++i) {
        AnnotatedPerson agent;
        agent.image_id = "im" + std::to_string(i);
        agent.person_id = "p0";
        agent.image_path = agent.image_id + ".png";
        agent.bbox = {0, 0, 2, 2};
        agent.labels = {static_cast<std::size_t>(i % 8)};
        corpus.persons.push_back(agent);
    }

    auto first = sample_candidates(corpus, 8, 42);
    auto second = sample_candidates(corpus, 8, 42);
    REQUIRE(first.size() == 8);
    CHECK(first == second);

    std::set<std::string> ids;
    for (const auto& agent : first) ids.insert(agent.image_id);
    CHECK(ids.size() == 8);  // all distinct

    auto reseeded = sample_candidates(corpus, 8, 43);
    CHECK(first != reseeded);

    CHECK(sample_candidates(corpus, 20, 1).size() == 20);
    CHECK_THROWS_AS(sample_candidates(corpus, 21, 1), std::runtime_error);
    CHECK(sample_candidates(corpus, 0, 1).empty());
}
