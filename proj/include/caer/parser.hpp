#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "caer/types.hpp"

namespace caer {

struct PredictionRecord {
    SourceId query;
    std::string raw_text;
    LabelSet predicted;
    std::vector<std::string> oov_labels;  // lower-cased, deduplicated, order of appearance
    bool parse_ok = false;

    bool operator==(const PredictionRecord&) const = default;
};

// Grammar: take the text after the last "Answer:" (case-insensitive) if one
// occurs, otherwise drop "Rationale:" lines; split on commas, newlines,
// semicolons, and the standalone word "and"; trim, case-fold and strip
// terminal punctuation from each token. Tokens matching a vocabulary entry
// become predicted indices, the rest are kept as OOV words. Never throws;
// unparseable text yields parse_ok=false with an empty prediction.
PredictionRecord parse_labels(const std::string& raw, const LabelVocabulary& vocab);

// One predictions-file line. Label indices render as names; extra keys in a
// parsed line are ignored, so callers may extend the record.
nlohmann::ordered_json prediction_json(const PredictionRecord& record,
                                       const LabelVocabulary& vocab);
PredictionRecord prediction_from_json(const nlohmann::ordered_json& line,
                                      const LabelVocabulary& vocab);

}  // namespace caer
