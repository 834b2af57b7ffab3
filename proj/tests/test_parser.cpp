#include "doctest.h"

#include <random>

#include "caer/dataset.hpp"
#include "caer/parser.hpp"
#include "caer/prompt.hpp"
#include "caer/util.hpp"

using namespace caer;

namespace {

LabelVocabulary heco8() {
    return load_vocabulary(std::string(CAER_FIXTURE_DIR) + "/vocab/heco8.txt");
}
LabelVocabulary emotic26() {
    return load_vocabulary(std::string(CAER_FIXTURE_DIR) + "/vocab/emotic26.txt");
}

}  // namespace

TEST_CASE("plain answers map straight to vocabulary indices") {
    LabelVocabulary vocab = emotic26();
    PredictionRecord r = parse_labels("Answer: Happiness, Excitement.", vocab);
    CHECK(r.parse_ok);
    CHECK(r.predicted == make_label_set({*vocab.index_of("Happiness"),
                                         *vocab.index_of("Excitement")}));
    CHECK(r.oov_labels.empty());
    CHECK(r.raw_text == "Answer: Happiness, Excitement.");
}

TEST_CASE("out-of-vocabulary words are preserved, not dropped") {
    LabelVocabulary vocab = emotic26();
    PredictionRecord r = parse_labels("Answer: Discomfort, Happiness", vocab);
    CHECK(r.parse_ok);
    CHECK(r.predicted == LabelSet{*vocab.index_of("Happiness")});
    CHECK(r.oov_labels == std::vector<std::string>{"discomfort"});

    // all-OOV output parses but predicts nothing
    PredictionRecord all_oov = parse_labels("Answer: Discomfort", vocab);
    CHECK_FALSE(all_oov.parse_ok);
    CHECK(all_oov.predicted.empty());
    CHECK(all_oov.oov_labels == std::vector<std::string>{"discomfort"});
}

TEST_CASE("empty and label-free completions fail the parse") {
    LabelVocabulary vocab = heco8();
    CHECK_FALSE(parse_labels("", vocab).parse_ok);
    CHECK_FALSE(parse_labels("   \n \t ", vocab).parse_ok);
    CHECK_FALSE(parse_labels("I cannot tell.", vocab).parse_ok);
    CHECK(parse_labels("", vocab).predicted.empty());
}

TEST_CASE("only the text after the last answer marker counts") {
    LabelVocabulary vocab = heco8();
    PredictionRecord r = parse_labels(
        "Answer: Anger\nWait, on reflection...\nANSWER: Peace", vocab);
    CHECK(r.predicted == LabelSet{*vocab.index_of("Peace")});

    // "answer:" mid-line and lower-case still wins
    r = parse_labels("The final answer: happiness", vocab);
    CHECK(r.predicted == LabelSet{*vocab.index_of("Happiness")});
}

TEST_CASE("rationale lines are dropped when no answer marker exists") {
    LabelVocabulary vocab = heco8();
    PredictionRecord r = parse_labels(
        "Rationale: the slumped posture reads as defeat.\nSadness", vocab);
    CHECK(r.predicted == LabelSet{*vocab.index_of("Sadness")});
    CHECK(r.oov_labels.empty());
}

TEST_CASE("separators: commas, semicolons, newlines and standalone and") {
    LabelVocabulary vocab = heco8();
    LabelSet expected = make_label_set({*vocab.index_of("Anger"), *vocab.index_of("Fear"),
                                        *vocab.index_of("Sadness")});
    CHECK(parse_labels("Answer: Anger, Fear, Sadness", vocab).predicted == expected);
    CHECK(parse_labels("Answer: Anger; Fear; Sadness", vocab).predicted == expected);
    CHECK(parse_labels("Answer: Anger\nFear\nSadness", vocab).predicted == expected);
    CHECK(parse_labels("Answer: Anger and Fear and Sadness", vocab).predicted == expected);
    CHECK(parse_labels("Answer: Anger, Fear, and Sadness.", vocab).predicted == expected);

    // "and" only splits as a whole word
    LabelVocabulary multi = emotic26();
    PredictionRecord r = parse_labels("Answer: Anticipation", multi);
    CHECK(r.predicted == LabelSet{*multi.index_of("Anticipation")});
}

TEST_CASE("multi-word labels survive tokenization") {
    LabelVocabulary vocab = emotic26();
    PredictionRecord r = parse_labels("Answer: Doubt/Confusion, Pain", vocab);
    CHECK(r.predicted == make_label_set({*vocab.index_of("Doubt/Confusion"),
                                         *vocab.index_of("Pain")}));
}

TEST_CASE("matching is case-insensitive and punctuation-tolerant") {
    LabelVocabulary vocab = heco8();
    CHECK(parse_labels("Answer: HAPPINESS!", vocab).predicted ==
          LabelSet{*vocab.index_of("Happiness")});
    CHECK(parse_labels("Answer: peace.", vocab).predicted ==
          LabelSet{*vocab.index_of("Peace")});
    CHECK(parse_labels("answer:   fear ;", vocab).predicted ==
          LabelSet{*vocab.index_of("Fear")});
}

TEST_CASE("duplicates collapse in both predictions and oov lists") {
    LabelVocabulary vocab = heco8();
    PredictionRecord r = parse_labels("Answer: Anger, anger, ANGER, boredom, Boredom", vocab);
    CHECK(r.predicted == LabelSet{*vocab.index_of("Anger")});
    CHECK(r.oov_labels == std::vector<std::string>{"boredom"});
    // nothing shows up on both sides
    for (const std::string& oov : r.oov_labels) {
        CHECK_FALSE(vocab.index_of(oov).has_value());
    }
}

TEST_CASE("rendered answers parse back to the same label set") {
    LabelVocabulary vocab = emotic26();
    std::mt19937_64 rng(20260814);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            if (bounded_rand(rng, 4) == 0) picks.push_back(i);
        }
        if (picks.empty()) picks.push_back(bounded_rand(rng, vocab.size()));
        LabelSet labels = make_label_set(picks);

        PredictionRecord r = parse_labels(render_answer(vocab, labels), vocab);
        CHECK(r.parse_ok);
        CHECK(r.predicted == labels);
        CHECK(r.oov_labels.empty());
    }
}

TEST_CASE("prediction lines round-trip through json") {
    LabelVocabulary vocab = emotic26();
    PredictionRecord r = parse_labels("Answer: Discomfort and Happiness", vocab);
    r.query = {"im_9", "p2"};

    nlohmann::ordered_json line = prediction_json(r, vocab);
    CHECK(line["image_id"] == "im_9");
    CHECK(line["person_id"] == "p2");
    CHECK(line["predicted"] == nlohmann::ordered_json::array({"Happiness"}));
    CHECK(line["oov_labels"] == nlohmann::ordered_json::array({"discomfort"}));
    CHECK(line["parse_ok"] == true);

    CHECK(prediction_from_json(line, vocab) == r);

    // extra keys are tolerated, unknown labels are not
    line["demonstrations"] = nlohmann::ordered_json::array({"x"});
    CHECK(prediction_from_json(line, vocab) == r);
    line["predicted"].push_back("NotALabel");
    CHECK_THROWS_AS(prediction_from_json(line, vocab), std::runtime_error);
}
