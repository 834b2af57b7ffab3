#include "caer/types.hpp"

#include <algorithm>

#include "caer/util.hpp"

namespace caer {

LabelSet make_label_set(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return indices;
}

LabelVocabulary::LabelVocabulary(std::string name, std::vector<std::string> labels,
                                 bool multi_label)
    : name_(std::move(name)), labels_(std::move(labels)), multi_label_(multi_label) {
    if (labels_.empty()) throw std::runtime_error("vocabulary '" + name_ + "' has no labels");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        std::string folded = to_lower(labels_[i]);
        if (folded.empty())
            throw std::runtime_error("vocabulary '" + name_ + "' has an empty label");
        auto [_, inserted] = folded_index_.emplace(std::move(folded), i);
        if (!inserted)
            throw std::runtime_error("vocabulary '" + name_ + "' has duplicate label '" +
                                     labels_[i] + "' after case-folding");
    }
}

std::optional<std::size_t> LabelVocabulary::index_of(const std::string& word) const {
    auto it = folded_index_.find(to_lower(word));
    if (it == folded_index_.end()) return std::nullopt;
    return it->second;
}

std::string LabelVocabulary::render(const LabelSet& set) const {
    std::string out;
    for (std::size_t i : set) {
        if (!out.empty()) out += ", ";
        out += label(i);
    }
    return out;
}

std::string LabelVocabulary::render_all() const {
    std::string out;
    for (const auto& l : labels_) {
        if (!out.empty()) out += ", ";
        out += l;
    }
    return out;
}

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw std::runtime_error("unknown split '" + name + "'");
}

}  // namespace caer
