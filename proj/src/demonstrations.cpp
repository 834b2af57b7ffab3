#include "caer/demonstrations.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "caer/image_io.hpp"
#include "caer/lvlm.hpp"
#include "caer/prompt.hpp"

namespace caer {

using json = nlohmann::ordered_json;

bool DemonstrationIndex::all_have_rationales() const {
    for (const auto& record : records) {
        if (!record.rationale) return false;
    }
    return true;
}

std::vector<ContextEmbeddings> DemonstrationIndex::embeddings() const {
    std::vector<ContextEmbeddings> out;
    out.reserve(records.size());
    for (const auto& record : records) out.push_back(record.embeddings);
    return out;
}

DemonstrationIndex build_index(const Corpus& corpus, std::size_t n, std::uint64_t seed,
                               EmbeddingProvider& provider) {
    DemonstrationIndex index;
    index.vocabulary = corpus.vocabulary;
    index.provenance = {corpus.split, seed, n};

    std::vector<std::string> failed;
    for (const auto& agent : sample_candidates(corpus, n, seed)) {
        try {
            DemonstrationRecord record;
            record.agent = agent;
            record.embeddings = embed_agent(provider, agent);
            index.records.push_back(std::move(record));
        } catch (const std::exception& e) {
            failed.push_back(agent.source().str() + ": " + e.what());
        }
    }
    if (!failed.empty()) {
        std::ostringstream msg;
        msg << "build_index failed for " << failed.size() << " agent(s):";
        for (const auto& f : failed) msg << "\n  " << f;
        throw std::runtime_error(msg.str());
    }
    return index;
}

namespace {

json vector_json(const EmbeddingVector& v) {
    json values = json::array();
    // Serialize at float32 precision; values are already quantized, so the
    // round trip through text is exact.
    for (double x : v.values) values.push_back(static_cast<float>(x));
    return values;
}

EmbeddingVector vector_from_json(const json& values) {
    EmbeddingVector v;
    v.values.reserve(values.size());
    for (const auto& x : values) {
        v.values.push_back(static_cast<double>(x.get<float>()));
    }
    return v;
}

}  // namespace

void save_index(const DemonstrationIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index file: " + path);

    json header = {
        {"vocabulary",
         {{"name", index.vocabulary.name()},
          {"multi_label", index.vocabulary.multi_label()},
          {"labels", index.vocabulary.labels()}}},
        {"provenance",
         {{"source_split", split_name(index.provenance.source_split)},
          {"sample_seed", index.provenance.sample_seed},
          {"n", index.provenance.n}}},
    };
    out << header.dump() << "\n";

    for (const auto& record : index.records) {
        const auto& agent = record.agent;
        json names = json::array();
        for (std::size_t id : agent.labels) names.push_back(index.vocabulary.label(id));
        json line = {
            {"image_id", agent.image_id},
            {"image_path", agent.image_path},
            {"person_id", agent.person_id},
            {"bbox", {agent.bbox.x_min, agent.bbox.y_min, agent.bbox.x_max, agent.bbox.y_max}},
            {"labels", names},
            {"person_embedding", vector_json(record.embeddings.person)},
            {"scene_embedding", vector_json(record.embeddings.scene)},
            {"overall_embedding", vector_json(record.embeddings.overall)},
        };
        if (record.rationale) line["rationale"] = *record.rationale;
        out << line.dump() << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DemonstrationIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read index file: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + ": empty index file");
    }

    DemonstrationIndex index;
    try {
        json header = json::parse(line);
        const json& vocab = header.at("vocabulary");
        index.vocabulary = LabelVocabulary(
            vocab.at("name").get<std::string>(),
            vocab.at("labels").get<std::vector<std::string>>(),
            vocab.at("multi_label").get<bool>());
        const json& prov = header.at("provenance");
        index.provenance.source_split =
            split_from_name(prov.at("source_split").get<std::string>());
        index.provenance.sample_seed = prov.at("sample_seed").get<std::uint64_t>();
        index.provenance.n = prov.at("n").get<std::size_t>();
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ":1: bad index header: " + e.what());
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json rec = json::parse(line);
            DemonstrationRecord record;
            record.agent.image_id = rec.at("image_id").get<std::string>();
            record.agent.person_id = rec.at("person_id").get<std::string>();
            record.agent.image_path = rec.at("image_path").get<std::string>();
            const json& bbox = rec.at("bbox");
            record.agent.bbox = {bbox.at(0).get<int>(), bbox.at(1).get<int>(),
                                 bbox.at(2).get<int>(), bbox.at(3).get<int>()};
            std::vector<std::size_t> ids;
            for (const auto& name : rec.at("labels")) {
                auto id = index.vocabulary.index_of(name.get<std::string>());
                if (!id) throw std::runtime_error("unknown label: " + name.get<std::string>());
                ids.push_back(*id);
            }
            record.agent.labels = make_label_set(std::move(ids));
            record.embeddings.source = record.agent.source();
            record.embeddings.person = vector_from_json(rec.at("person_embedding"));
            record.embeddings.scene = vector_from_json(rec.at("scene_embedding"));
            record.embeddings.overall = vector_from_json(rec.at("overall_embedding"));
            if (rec.contains("rationale")) {
                record.rationale = rec.at("rationale").get<std::string>();
            }
            index.records.push_back(std::move(record));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (index.records.size() != index.provenance.n) {
        throw std::runtime_error(path + ": header declares n=" +
                                 std::to_string(index.provenance.n) + " but file has " +
                                 std::to_string(index.records.size()) + " records");
    }
    return index;
}

std::string rationale_request_text(const LabelVocabulary& vocab, const LabelSet& labels) {
    return "You are shown an image with a person in a red box. The person's emotions are: " +
           vocab.render(labels) +
           ". In 2–4 sentences, explain which visual cues (facial expression, body "
           "posture, interactions, surrounding scene) justify these emotions.";
}

std::string generate_rationale(DemonstrationRecord& record, LvlmBackend& client,
                               const LabelVocabulary& vocab,
                               std::shared_ptr<const ContextImage> annotated) {
    PromptBundle bundle;
    bundle.meta.query = record.agent.source();
    bundle.segments.push_back(
        PromptSegment::make_text(rationale_request_text(vocab, record.agent.labels)));
    bundle.segments.push_back(PromptSegment::make_image(std::move(annotated)));

    Completion completion = client.complete(bundle);
    if (completion.raw_text.empty()) {
        throw std::runtime_error("empty rationale completion for " +
                                 record.agent.source().str());
    }
    record.rationale = completion.raw_text;
    return completion.raw_text;
}

std::size_t generate_rationales(DemonstrationIndex& index, LvlmBackend& client) {
    std::size_t generated = 0;
    for (auto& record : index.records) {
        if (record.rationale) continue;
        Image image = load_image(record.agent.image_path);
        auto annotated = std::make_shared<ContextImage>(annotate_target(
            image, record.agent.bbox, record.agent.source(), default_stroke(image)));
        generate_rationale(record, client, index.vocabulary, std::move(annotated));
        ++generated;
    }
    return generated;
}

}  // namespace caer
