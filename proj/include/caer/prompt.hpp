#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "caer/demonstrations.hpp"
#include "caer/image.hpp"
#include "caer/retrieval.hpp"
#include "caer/types.hpp"

namespace caer {

enum class RunSetting { zero_shot, few_shot, few_shot_cot };

std::string run_setting_name(RunSetting s);
RunSetting run_setting_from_name(const std::string& name);

// Exactly one of text/image is populated.
struct PromptSegment {
    enum class Kind { text, image };

    Kind kind = Kind::text;
    std::string text;
    std::shared_ptr<const ContextImage> image;

    static PromptSegment make_text(std::string t);
    static PromptSegment make_image(std::shared_ptr<const ContextImage> img);
};

struct BundleMeta {
    SourceId query;
    RunSetting setting = RunSetting::zero_shot;
    std::size_t k = 0;
    RetrievalMode mode = RetrievalMode::fused;
    // Candidate indices of the demonstrations, most similar first.
    std::vector<std::size_t> selected_indices;
};

// The full interleaved input for one query: instruction text first, then the
// demonstration segments in retrieval order, then the annotated test image.
struct PromptBundle {
    std::vector<PromptSegment> segments;
    BundleMeta meta;
};

// "Given the list of emotion labels: <names>, please choose which emotion is
// more suitable for describing how the person in the red box feels"; the
// multi-label wording swaps in "emotions are". zero_shot appends
// " Reply with label(s) only." so completions come back bare.
std::string build_instruction(const LabelVocabulary& vocab, bool zero_shot);

// "Answer: <label1>, <label2>, ..." in vocabulary order — the exact format
// demonstrations teach and the parser inverts.
std::string render_answer(const LabelVocabulary& vocab, const LabelSet& labels);

// [annotated image, answer text]; with cot, the text is
// "Rationale: <rationale>\nAnswer: <labels>". Throws if cot is requested but
// the record has no rationale.
std::vector<PromptSegment> build_demonstration(const DemonstrationRecord& record,
                                               const LabelVocabulary& vocab, bool cot,
                                               std::shared_ptr<const ContextImage> annotated);

// [instruction] + demonstrations + [test image, "Answer:"]. With no
// demonstrations the bundle is just [instruction, test image]; the caller
// passes the zero-shot instruction variant in that case.
PromptBundle assemble_input(std::string instruction,
                            const std::vector<std::vector<PromptSegment>>& demonstrations,
                            std::shared_ptr<const ContextImage> test_image, BundleMeta meta);

// Audit/golden serialization: images are replaced by their cache keys.
nlohmann::json bundle_debug_json(const PromptBundle& bundle);

}  // namespace caer
