#include "caer/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "caer/util.hpp"

namespace caer {

using nlohmann::json;

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

LabelVocabulary load_vocabulary(const std::string& vocab_path) {
    std::ifstream in = open_or_throw(vocab_path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(vocab_path + ": empty vocabulary file");
    line = trim(line);
    bool multi_label;
    if (line == "#multi_label=true")
        multi_label = true;
    else if (line == "#multi_label=false")
        multi_label = false;
    else
        line_error(vocab_path, 1, "expected header '#multi_label=true|false', got '" + line + "'");

    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) labels.push_back(line);
    }
    std::string name = std::filesystem::path(vocab_path).stem().string();
    return LabelVocabulary(name, std::move(labels), multi_label);
}

Corpus load_corpus(const std::string& annotation_path, const std::string& vocab_path,
                   Split split) {
    Corpus corpus;
    corpus.vocabulary = load_vocabulary(vocab_path);
    corpus.split = split;

    std::ifstream in = open_or_throw(annotation_path);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::pair<std::string, std::string>> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(annotation_path, line_no, std::string("invalid JSON: ") + e.what());
        }

        AnnotatedPerson person;
        try {
            person.image_id = rec.at("image_id").get<std::string>();
            person.image_path = rec.at("image_path").get<std::string>();
            person.person_id = rec.at("person_id").get<std::string>();
            const auto& bbox = rec.at("bbox");
            if (!bbox.is_array() || bbox.size() != 4)
                throw std::runtime_error("bbox must be [x_min, y_min, x_max, y_max]");
            person.bbox = {bbox[0].get<int>(), bbox[1].get<int>(), bbox[2].get<int>(),
                           bbox[3].get<int>()};
            if (!rec.at("labels").is_array() || rec["labels"].empty())
                throw std::runtime_error("labels must be a non-empty array of strings");
            std::vector<std::size_t> indices;
            for (const auto& l : rec["labels"]) {
                std::string name = l.get<std::string>();
                auto idx = corpus.vocabulary.index_of(name);
                if (!idx)
                    throw std::runtime_error("unknown label '" + name + "' (vocabulary '" +
                                             corpus.vocabulary.name() + "')");
                indices.push_back(*idx);
            }
            person.labels = make_label_set(std::move(indices));
        } catch (const json::exception& e) {
            line_error(annotation_path, line_no, std::string("schema error: ") + e.what());
        } catch (const std::runtime_error& e) {
            line_error(annotation_path, line_no, std::string("schema error: ") + e.what());
        }

        const auto& b = person.bbox;
        if (b.x_min == b.x_max || b.y_min == b.y_max)
            line_error(annotation_path, line_no, "schema error: zero-area bbox");
        if (b.x_min < 0 || b.y_min < 0 || b.x_min > b.x_max || b.y_min > b.y_max)
            line_error(annotation_path, line_no,
                       "schema error: bbox out of range (min inclusive, max exclusive, "
                       "origin top-left)");
        if (!seen_ids.emplace(person.image_id, person.person_id).second)
            line_error(annotation_path, line_no,
                       "duplicate (image_id, person_id) = (" + person.image_id + ", " +
                           person.person_id + ")");

        corpus.persons.push_back(std::move(person));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& annotation_path) {
    std::ofstream out(annotation_path);
    if (!out) throw std::runtime_error("cannot write file: " + annotation_path);
    for (const auto& p : corpus.persons) {
        json rec;
        rec["image_id"] = p.image_id;
        rec["image_path"] = p.image_path;
        rec["person_id"] = p.person_id;
        rec["bbox"] = {p.bbox.x_min, p.bbox.y_min, p.bbox.x_max, p.bbox.y_max};
        json labels = json::array();
        for (std::size_t i : p.labels) labels.push_back(corpus.vocabulary.label(i));
        rec["labels"] = labels;
        out << rec.dump() << "\n";
    }
}

std::vector<AnnotatedPerson> sample_candidates(const Corpus& corpus, std::size_t n,
                                               std::uint64_t seed) {
    if (n > corpus.size())
        throw std::runtime_error("sample size " + std::to_string(n) +
                                 " exceeds corpus size " + std::to_string(corpus.size()));
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    deterministic_shuffle(order, rng);

    std::vector<AnnotatedPerson> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(corpus.persons[order[i]]);
    return out;
}

}  // namespace caer
