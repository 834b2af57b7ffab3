#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "caer/dataset.hpp"
#include "caer/embedding.hpp"
#include "caer/image.hpp"
#include "caer/types.hpp"

namespace caer {

class LvlmBackend;

// One candidate demonstration: the agent, its context embeddings, and an
// optional rationale once CoT preparation has run. The answer labels are the
// agent's ground-truth labels.
struct DemonstrationRecord {
    AnnotatedPerson agent;
    ContextEmbeddings embeddings;
    std::optional<std::string> rationale;

    const LabelSet& answer_labels() const { return agent.labels; }
    bool operator==(const DemonstrationRecord&) const = default;
};

struct IndexProvenance {
    Split source_split = Split::train;
    std::uint64_t sample_seed = 0;
    std::size_t n = 0;

    bool operator==(const IndexProvenance&) const = default;
};

struct DemonstrationIndex {
    LabelVocabulary vocabulary;
    std::vector<DemonstrationRecord> records;
    IndexProvenance provenance;

    std::size_t size() const { return records.size(); }
    bool all_have_rationales() const;
    std::vector<ContextEmbeddings> embeddings() const;
};

// Samples n candidates from the corpus (sample_candidates semantics) and
// embeds each via embed_agent. Aborts listing every failed agent if any
// image cannot be processed.
DemonstrationIndex build_index(const Corpus& corpus, std::size_t n, std::uint64_t seed,
                               EmbeddingProvider& provider);

// JSONL: a header line with vocabulary and provenance, then one record per
// line with embedded vectors and the optional "rationale" field.
// load_index(save_index(i)) == i, field for field.
void save_index(const DemonstrationIndex& index, const std::string& path);
DemonstrationIndex load_index(const std::string& path);

// The request sent alongside the red-box image when asking a vision endpoint
// to justify the ground-truth labels of a demonstration.
std::string rationale_request_text(const LabelVocabulary& vocab, const LabelSet& labels);

// Asks `client` for a rationale for one record and stores it. The request
// carries the annotated image plus all ground-truth label names. An empty
// completion is an error and leaves the record unchanged.
std::string generate_rationale(DemonstrationRecord& record, LvlmBackend& client,
                               const LabelVocabulary& vocab,
                               std::shared_ptr<const ContextImage> annotated);

// Fills rationales for every record that lacks one, decoding each agent's
// image to build the annotated view. Returns the number generated.
std::size_t generate_rationales(DemonstrationIndex& index, LvlmBackend& client);

}  // namespace caer
