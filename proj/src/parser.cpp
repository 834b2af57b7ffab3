#include "caer/parser.hpp"

#include <algorithm>
#include <sstream>

#include "caer/util.hpp"

namespace caer {

using json = nlohmann::ordered_json;

namespace {

std::string strip_terminal_punct(std::string s) {
    while (!s.empty()) {
        char c = s.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?') {
            s.pop_back();
        } else {
            break;
        }
    }
    return s;
}

// The candidate region of the completion: everything after the last
// "Answer:" when present, otherwise the text minus "Rationale:" lines.
std::string answer_region(const std::string& raw) {
    std::string folded = to_lower(raw);
    std::size_t pos = folded.rfind("answer:");
    if (pos != std::string::npos) {
        return raw.substr(pos + 7);
    }
    std::string kept;
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        if (starts_with_ci(trim(line), "rationale:")) continue;
        kept += line;
        kept += '\n';
    }
    return kept;
}

// Commas, newlines and semicolons separate tokens; so does "and" as a
// standalone word ("Happiness and Excitement" is two labels, "Anger" stays
// whole).
std::vector<std::string> tokenize(const std::string& region) {
    std::vector<std::string> fragments;
    std::string current;
    for (char c : region) {
        if (c == ',' || c == ';' || c == '\n' || c == '\r') {
            fragments.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fragments.push_back(current);

    std::vector<std::string> tokens;
    for (const auto& fragment : fragments) {
        std::string word, token;
        auto flush_word = [&](bool boundary_and) {
            if (boundary_and) {
                tokens.push_back(token);
                token.clear();
            } else {
                if (!token.empty()) token += ' ';
                token += word;
            }
            word.clear();
        };
        for (char c : fragment) {
            if (c == ' ' || c == '\t') {
                if (!word.empty()) flush_word(to_lower(word) == "and");
            } else {
                word += c;
            }
        }
        if (!word.empty()) flush_word(to_lower(word) == "and");
        tokens.push_back(token);
    }
    return tokens;
}

}  // namespace

PredictionRecord parse_labels(const std::string& raw, const LabelVocabulary& vocab) {
    PredictionRecord record;
    record.raw_text = raw;

    std::vector<std::size_t> predicted;
    for (const auto& token : tokenize(answer_region(raw))) {
        std::string normalized = to_lower(strip_terminal_punct(trim(token)));
        if (normalized.empty()) continue;
        if (auto id = vocab.index_of(normalized)) {
            predicted.push_back(*id);
        } else if (std::find(record.oov_labels.begin(), record.oov_labels.end(),
                             normalized) == record.oov_labels.end()) {
            record.oov_labels.push_back(normalized);
        }
    }
    record.predicted = make_label_set(std::move(predicted));
    record.parse_ok = !record.predicted.empty();
    return record;
}

json prediction_json(const PredictionRecord& record, const LabelVocabulary& vocab) {
    json names = json::array();
    for (std::size_t id : record.predicted) names.push_back(vocab.label(id));
    return json{
        {"image_id", record.query.image_id},
        {"person_id", record.query.person_id},
        {"raw_text", record.raw_text},
        {"predicted", names},
        {"oov_labels", record.oov_labels},
        {"parse_ok", record.parse_ok},
    };
}

PredictionRecord prediction_from_json(const json& line, const LabelVocabulary& vocab) {
    PredictionRecord record;
    record.query = {line.at("image_id").get<std::string>(),
                    line.at("person_id").get<std::string>()};
    record.raw_text = line.at("raw_text").get<std::string>();
    std::vector<std::size_t> ids;
    for (const auto& name : line.at("predicted")) {
        auto id = vocab.index_of(name.get<std::string>());
        if (!id) throw std::runtime_error("prediction uses unknown label: " +
                                          name.get<std::string>());
        ids.push_back(*id);
    }
    record.predicted = make_label_set(std::move(ids));
    record.oov_labels = line.at("oov_labels").get<std::vector<std::string>>();
    record.parse_ok = line.at("parse_ok").get<bool>();
    return record;
}

}  // namespace caer
