#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caer/embedding.hpp"

namespace caer {

// The five candidate-ranking strategies. `fused` averages the person-context
// and scene-context cosines; `overall` ranks by whole-image cosine;
// person_only/scene_only use a single context; `random` is a seeded shuffle.
enum class RetrievalMode { fused, overall, person_only, scene_only, random };

std::string retrieval_mode_name(RetrievalMode mode);
RetrievalMode retrieval_mode_from_name(const std::string& name);

struct SimilarityScore {
    std::size_t candidate_index = 0;
    double person_sim = 0.0;
    double scene_sim = 0.0;
    // The score the mode ranks by. In fused mode this is
    // (person_sim + scene_sim) / 2; in random mode it is a rank-derived
    // placeholder so the descending-order invariant still holds.
    double fused = 0.0;
};

struct Ranking {
    SourceId query;
    RetrievalMode mode = RetrievalMode::fused;
    // Candidate indices in descending score order, ties broken by ascending index.
    std::vector<std::size_t> ordered_indices;
    // scores[i] belongs to candidate i (input order), not rank order.
    std::vector<SimilarityScore> scores;
    // Candidate identities, input order; lets top_k apply image exclusions.
    std::vector<SourceId> candidate_sources;
};

// Cosine of the angle between u and v, computed in 64-bit. Throws on
// dimension mismatch or a zero-norm input.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// Person and scene cosines plus their arithmetic mean.
SimilarityScore fused_similarity(const ContextEmbeddings& query,
                                 const ContextEmbeddings& candidate,
                                 std::size_t candidate_index = 0);

// Full descending ordering of the candidates under the given mode.
// `seed` only matters in random mode, where it is mixed with the query id so
// each query draws its own reproducible shuffle.
Ranking rank_candidates(const ContextEmbeddings& query,
                        const std::vector<ContextEmbeddings>& candidates,
                        RetrievalMode mode, std::uint64_t seed = 0);

// First k ranked indices after dropping candidates that share the query's
// image. Returns fewer than k only when the filtered pool is smaller.
std::vector<std::size_t> top_k(const Ranking& ranking, std::size_t k,
                               const std::string& exclude_image_id);

}  // namespace caer
