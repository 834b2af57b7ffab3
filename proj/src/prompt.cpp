#include "caer/prompt.hpp"

#include <stdexcept>

namespace caer {

std::string run_setting_name(RunSetting s) {
    switch (s) {
        case RunSetting::zero_shot: return "zero_shot";
        case RunSetting::few_shot: return "few_shot";
        case RunSetting::few_shot_cot: return "few_shot_cot";
    }
    return "zero_shot";
}

RunSetting run_setting_from_name(const std::string& name) {
    if (name == "zero_shot") return RunSetting::zero_shot;
    if (name == "few_shot") return RunSetting::few_shot;
    if (name == "few_shot_cot") return RunSetting::few_shot_cot;
    throw std::runtime_error("unknown setting '" + name + "'");
}

PromptSegment PromptSegment::make_text(std::string t) {
    PromptSegment s;
    s.kind = Kind::text;
    s.text = std::move(t);
    return s;
}

PromptSegment PromptSegment::make_image(std::shared_ptr<const ContextImage> img) {
    if (!img) throw std::runtime_error("image segment requires an image");
    PromptSegment s;
    s.kind = Kind::image;
    s.image = std::move(img);
    return s;
}

std::string build_instruction(const LabelVocabulary& vocab, bool zero_shot) {
    std::string text = "Given the list of emotion labels: " + vocab.render_all() +
                       ", please choose which ";
    text += vocab.multi_label() ? "emotions are" : "emotion is";
    text += " more suitable for describing how the person in the red box feels";
    if (zero_shot) text += " Reply with label(s) only.";
    return text;
}

std::string render_answer(const LabelVocabulary& vocab, const LabelSet& labels) {
    return "Answer: " + vocab.render(labels);
}

std::vector<PromptSegment> build_demonstration(const DemonstrationRecord& record,
                                               const LabelVocabulary& vocab, bool cot,
                                               std::shared_ptr<const ContextImage> annotated) {
    std::string answer = render_answer(vocab, record.answer_labels());
    std::string text;
    if (cot) {
        if (!record.rationale)
            throw std::runtime_error("CoT demonstration for " + record.agent.source().str() +
                                     " has no rationale; run rationale generation first");
        text = "Rationale: " + *record.rationale + "\n" + answer;
    } else {
        text = answer;
    }
    return {PromptSegment::make_image(std::move(annotated)),
            PromptSegment::make_text(std::move(text))};
}

PromptBundle assemble_input(std::string instruction,
                            const std::vector<std::vector<PromptSegment>>& demonstrations,
                            std::shared_ptr<const ContextImage> test_image, BundleMeta meta) {
    PromptBundle bundle;
    bundle.meta = std::move(meta);
    bundle.segments.push_back(PromptSegment::make_text(std::move(instruction)));
    for (const auto& demo : demonstrations)
        bundle.segments.insert(bundle.segments.end(), demo.begin(), demo.end());
    bundle.segments.push_back(PromptSegment::make_image(std::move(test_image)));
    // The trailing cue mirrors the demonstration format; zero-shot prompts
    // rely on "Reply with label(s) only." instead.
    if (!demonstrations.empty()) bundle.segments.push_back(PromptSegment::make_text("Answer:"));
    return bundle;
}

nlohmann::json bundle_debug_json(const PromptBundle& bundle) {
    nlohmann::json out;
    out["meta"] = {{"query", bundle.meta.query.str()},
                   {"setting", run_setting_name(bundle.meta.setting)},
                   {"k", bundle.meta.k},
                   {"retrieval_mode", retrieval_mode_name(bundle.meta.mode)},
                   {"selected_indices", bundle.meta.selected_indices}};
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& seg : bundle.segments) {
        if (seg.kind == PromptSegment::Kind::text)
            segments.push_back({{"kind", "text"}, {"text", seg.text}});
        else
            segments.push_back({{"kind", "image"}, {"key", seg.image->cache_key()}});
    }
    out["segments"] = segments;
    return out;
}

}  // namespace caer
