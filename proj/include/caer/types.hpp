#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace caer {

// Identity of one annotated agent. (image_id, person_id) is unique corpus-wide;
// several agents may share an image.
struct SourceId {
    std::string image_id;
    std::string person_id;

    bool operator==(const SourceId&) const = default;
    std::string str() const { return image_id + "__" + person_id; }
};

// Pixel rectangle, min inclusive, max exclusive, origin top-left.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    bool operator==(const BoundingBox&) const = default;
    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
};

// Label indices kept sorted and unique; acts as a set.
using LabelSet = std::vector<std::size_t>;

LabelSet make_label_set(std::vector<std::size_t> indices);

class LabelVocabulary {
  public:
    LabelVocabulary() = default;
    // Throws std::runtime_error if labels are empty or collide after case-folding.
    LabelVocabulary(std::string name, std::vector<std::string> labels, bool multi_label);

    const std::string& name() const { return name_; }
    bool multi_label() const { return multi_label_; }
    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }

    // Case-insensitive lookup; nullopt when the word is out of vocabulary.
    std::optional<std::size_t> index_of(const std::string& word) const;

    // Comma-separated label names in vocabulary (= class id) order.
    std::string render(const LabelSet& set) const;
    std::string render_all() const;

    bool operator==(const LabelVocabulary& other) const {
        return name_ == other.name_ && labels_ == other.labels_ &&
               multi_label_ == other.multi_label_;
    }

  private:
    std::string name_;
    std::vector<std::string> labels_;
    bool multi_label_ = true;
    std::unordered_map<std::string, std::size_t> folded_index_;
};

struct AnnotatedPerson {
    std::string image_id;
    std::string image_path;
    std::string person_id;
    BoundingBox bbox;
    LabelSet labels;

    bool operator==(const AnnotatedPerson&) const = default;
    SourceId source() const { return {image_id, person_id}; }
};

enum class Split { train, val, test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct Corpus {
    LabelVocabulary vocabulary;
    std::vector<AnnotatedPerson> persons;
    Split split = Split::train;

    std::size_t size() const { return persons.size(); }
};

}  // namespace caer
