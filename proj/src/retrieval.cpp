#include "caer/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "caer/util.hpp"

namespace caer {

std::string retrieval_mode_name(RetrievalMode mode) {
    switch (mode) {
        case RetrievalMode::fused: return "fused";
        case RetrievalMode::overall: return "overall";
        case RetrievalMode::person_only: return "person_only";
        case RetrievalMode::scene_only: return "scene_only";
        case RetrievalMode::random: return "random";
    }
    return "fused";
}

RetrievalMode retrieval_mode_from_name(const std::string& name) {
    if (name == "fused") return RetrievalMode::fused;
    if (name == "overall") return RetrievalMode::overall;
    if (name == "person_only") return RetrievalMode::person_only;
    if (name == "scene_only") return RetrievalMode::scene_only;
    if (name == "random") return RetrievalMode::random;
    throw std::runtime_error("unknown retrieval mode '" + name + "'");
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim())
        throw std::runtime_error("cosine: dimension mismatch (" + std::to_string(u.dim()) +
                                 " vs " + std::to_string(v.dim()) + ")");
    if (u.dim() == 0) throw std::runtime_error("cosine: empty vectors");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) throw std::runtime_error("cosine: zero-norm vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

SimilarityScore fused_similarity(const ContextEmbeddings& query,
                                 const ContextEmbeddings& candidate,
                                 std::size_t candidate_index) {
    SimilarityScore s;
    s.candidate_index = candidate_index;
    s.person_sim = cosine(query.person, candidate.person);
    s.scene_sim = cosine(query.scene, candidate.scene);
    s.fused = (s.person_sim + s.scene_sim) / 2.0;
    return s;
}

Ranking rank_candidates(const ContextEmbeddings& query,
                        const std::vector<ContextEmbeddings>& candidates,
                        RetrievalMode mode, std::uint64_t seed) {
    if (candidates.empty()) throw std::runtime_error("rank_candidates: no candidates");

    Ranking ranking;
    ranking.query = query.source;
    ranking.mode = mode;
    ranking.scores.reserve(candidates.size());
    ranking.candidate_sources.reserve(candidates.size());
    for (const auto& c : candidates) ranking.candidate_sources.push_back(c.source);

    if (mode == RetrievalMode::random) {
        std::vector<std::size_t> order(candidates.size());
        std::iota(order.begin(), order.end(), 0);
        // Mix the run seed with the query id so every query draws a distinct
        // but reproducible shuffle.
        std::uint64_t mixed = fnv1a64(query.source.person_id,
                                      fnv1a64(query.source.image_id)) ^ seed;
        std::mt19937_64 rng(mixed);
        deterministic_shuffle(order, rng);
        ranking.ordered_indices = order;
        ranking.scores.resize(candidates.size());
        const double n = static_cast<double>(candidates.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            SimilarityScore& s = ranking.scores[order[pos]];
            s.candidate_index = order[pos];
            s.fused = 1.0 - 2.0 * static_cast<double>(pos) / n;
        }
        return ranking;
    }

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        SimilarityScore s;
        s.candidate_index = i;
        switch (mode) {
            case RetrievalMode::fused:
                s = fused_similarity(query, candidates[i], i);
                break;
            case RetrievalMode::overall:
                s.fused = cosine(query.overall, candidates[i].overall);
                break;
            case RetrievalMode::person_only:
                s.person_sim = cosine(query.person, candidates[i].person);
                s.fused = s.person_sim;
                break;
            case RetrievalMode::scene_only:
                s.scene_sim = cosine(query.scene, candidates[i].scene);
                s.fused = s.scene_sim;
                break;
            case RetrievalMode::random:
                break;  // handled above
        }
        ranking.scores.push_back(s);
    }

    ranking.ordered_indices.resize(candidates.size());
    std::iota(ranking.ordered_indices.begin(), ranking.ordered_indices.end(), 0);
    std::stable_sort(ranking.ordered_indices.begin(), ranking.ordered_indices.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (ranking.scores[a].fused != ranking.scores[b].fused)
                             return ranking.scores[a].fused > ranking.scores[b].fused;
                         return a < b;
                     });
    return ranking;
}

std::vector<std::size_t> top_k(const Ranking& ranking, std::size_t k,
                               const std::string& exclude_image_id) {
    std::vector<std::size_t> out;
    out.reserve(std::min(k, ranking.ordered_indices.size()));
    for (std::size_t idx : ranking.ordered_indices) {
        if (out.size() == k) break;
        if (!exclude_image_id.empty() &&
            ranking.candidate_sources.at(idx).image_id == exclude_image_id)
            continue;
        out.push_back(idx);
    }
    return out;
}

}  // namespace caer
