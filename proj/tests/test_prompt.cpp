#include "doctest.h"

#include <cstdlib>

#include "caer/dataset.hpp"
#include "caer/prompt.hpp"
#include "caer/synthetic.hpp"
#include "support.hpp"

using namespace caer;
using caer::testing::read_file;
using caer::testing::write_file;

namespace {

const char* kGoldenDir = CAER_GOLDEN_DIR;
const char* kVocabDir = CAER_FIXTURE_DIR "/vocab";

LabelVocabulary heco8() { return load_vocabulary(std::string(kVocabDir) + "/heco8.txt"); }
LabelVocabulary emotic26() { return load_vocabulary(std::string(kVocabDir) + "/emotic26.txt"); }

// Compare against a stored golden; CAER_UPDATE_GOLDEN=1 rewrites it instead.
void check_golden(const std::string& name, const std::string& actual) {
    const std::string path = std::string(kGoldenDir) + "/" + name;
    if (std::getenv("CAER_UPDATE_GOLDEN")) {
        write_file(path, actual);
        return;
    }
    CHECK(actual == read_file(path));
}

std::shared_ptr<const ContextImage> fake_annotated(const std::string& image_id,
                                                   const std::string& person_id) {
    auto ctx = std::make_shared<ContextImage>();
    ctx->kind = ContextKind::annotated;
    ctx->source = {image_id, person_id};
    ctx->image = random_image(4, 4, 1);
    return ctx;
}

DemonstrationRecord make_record(const std::string& image_id, LabelSet labels,
                                std::optional<std::string> rationale = std::nullopt) {
    DemonstrationRecord record;
    record.agent.image_id = image_id;
    record.agent.person_id = "p0";
    record.agent.image_path = image_id + ".png";
    record.agent.bbox = {0, 0, 2, 2};
    record.agent.labels = std::move(labels);
    record.rationale = std::move(rationale);
    return record;
}

}  // namespace

TEST_CASE("instruction strings match the stored goldens byte for byte") {
    check_golden("instruction_heco8_fewshot.txt", build_instruction(heco8(), false));
    check_golden("instruction_heco8_zeroshot.txt", build_instruction(heco8(), true));
    check_golden("instruction_emotic26_fewshot.txt", build_instruction(emotic26(), false));
    check_golden("instruction_emotic26_zeroshot.txt", build_instruction(emotic26(), true));
}

TEST_CASE("instruction wording flips with the vocabulary arity") {
    std::string single = build_instruction(heco8(), false);
    CHECK(single.find("which emotion is more suitable") != std::string::npos);
    CHECK(single.find("person in the red box feels") != std::string::npos);
    CHECK(single.find("Reply with") == std::string::npos);

    std::string multi = build_instruction(emotic26(), false);
    CHECK(multi.find("which emotions are more suitable") != std::string::npos);

    std::string zero = build_instruction(heco8(), true);
    CHECK(zero.substr(zero.size() - 26) == " Reply with label(s) only.");
}

TEST_CASE("answers render labels in vocabulary order") {
    LabelVocabulary vocab = heco8();
    CHECK(render_answer(vocab, {5}) == "Answer: Anger");
    CHECK(render_answer(vocab, make_label_set({7, 0, 2})) ==
          "Answer: Surprise, Happiness, Sadness");
    CHECK(render_answer(vocab, {}) == "Answer: ");
}

TEST_CASE("demonstrations pair the annotated image with the answer text") {
    LabelVocabulary vocab = heco8();
    DemonstrationRecord record = make_record("demo1", {2});

    auto segments = build_demonstration(record, vocab, false, fake_annotated("demo1", "p0"));
    REQUIRE(segments.size() == 2);
    CHECK(segments[0].kind == PromptSegment::Kind::image);
    CHECK(segments[0].image->cache_key() == "demo1__p0__annotated");
    CHECK(segments[1].kind == PromptSegment::Kind::text);
    CHECK(segments[1].text == "Answer: Happiness");
}

TEST_CASE("cot demonstrations embed the rationale byte-exactly") {
    LabelVocabulary vocab = heco8();
    DemonstrationRecord record =
        make_record("demo2", make_label_set({6, 3}), "The wide eyes say it all.");

    auto segments = build_demonstration(record, vocab, true, fake_annotated("demo2", "p0"));
    CHECK(segments[1].text == "Rationale: The wide eyes say it all.\nAnswer: Peace, Fear");

    DemonstrationRecord bare = make_record("demo3", {1});
    CHECK_THROWS_WITH_AS(build_demonstration(bare, vocab, true, fake_annotated("demo3", "p0")),
                         doctest::Contains("no rationale"), std::runtime_error);
}

TEST_CASE("zero-shot bundles are instruction plus test image only") {
    BundleMeta meta;
    meta.query = {"q", "p0"};
    PromptBundle bundle =
        assemble_input(build_instruction(heco8(), true), {}, fake_annotated("q", "p0"), meta);

    REQUIRE(bundle.segments.size() == 2);
    CHECK(bundle.segments[0].kind == PromptSegment::Kind::text);
    CHECK(bundle.segments[1].kind == PromptSegment::Kind::image);
    // no trailing "Answer:" cue in zero-shot
    CHECK(bundle.segments[0].text.find("Reply with label(s) only.") != std::string::npos);
}

TEST_CASE("k-shot bundles interleave demonstrations then cue the answer") {
    LabelVocabulary vocab = heco8();
    std::vector<std::vector<PromptSegment>> demos;
    demos.push_back(build_demonstration(make_record("d1", {0}), vocab, false,
                                        fake_annotated("d1", "p0")));
    demos.push_back(build_demonstration(make_record("d2", {4}), vocab, false,
                                        fake_annotated("d2", "p0")));

    BundleMeta meta;
    meta.query = {"q", "p0"};
    meta.setting = RunSetting::few_shot;
    meta.k = 2;
    meta.selected_indices = {3, 9};
    PromptBundle bundle = assemble_input(build_instruction(vocab, false), demos,
                                         fake_annotated("q", "p0"), meta);

    // instruction + 2 * (image, answer) + test image + "Answer:"
    REQUIRE(bundle.segments.size() == 7);
    CHECK(bundle.segments[0].kind == PromptSegment::Kind::text);
    CHECK(bundle.segments[1].image->cache_key() == "d1__p0__annotated");
    CHECK(bundle.segments[2].text == "Answer: Surprise");
    CHECK(bundle.segments[3].image->cache_key() == "d2__p0__annotated");
    CHECK(bundle.segments[4].text == "Answer: Disgust");
    CHECK(bundle.segments[5].image->cache_key() == "q__p0__annotated");
    CHECK(bundle.segments[6].text == "Answer:");
    CHECK(bundle.meta.selected_indices == std::vector<std::size_t>{3, 9});
}

TEST_CASE("bundle debug json matches its golden") {
    LabelVocabulary vocab = heco8();
    std::vector<std::vector<PromptSegment>> demos;
    demos.push_back(build_demonstration(make_record("d1", {5}, "Clenched fists."), vocab, true,
                                        fake_annotated("d1", "p0")));

    BundleMeta meta;
    meta.query = {"q7", "p1"};
    meta.setting = RunSetting::few_shot_cot;
    meta.k = 1;
    meta.mode = RetrievalMode::fused;
    meta.selected_indices = {12};
    PromptBundle bundle = assemble_input(build_instruction(vocab, false), demos,
                                         fake_annotated("q7", "p1"), meta);

    check_golden("bundle_1shot_cot.json", bundle_debug_json(bundle).dump(2) + "\n");
}

TEST_CASE("segment constructors enforce their payload") {
    CHECK_THROWS_AS(PromptSegment::make_image(nullptr), std::runtime_error);
    PromptSegment text = PromptSegment::make_text("hi");
    CHECK(text.kind == PromptSegment::Kind::text);
    CHECK(text.image == nullptr);
}
