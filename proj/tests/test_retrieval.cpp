#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "caer/retrieval.hpp"

using namespace caer;

namespace {

ContextEmbeddings make_embeddings(const SourceId& source, std::vector<double> person,
                                  std::vector<double> scene, std::vector<double> overall) {
    ContextEmbeddings e;
    e.source = source;
    e.person.values = std::move(person);
    e.scene.values = std::move(scene);
    e.overall.values = std::move(overall);
    return e;
}

ContextEmbeddings random_embeddings(std::mt19937_64& rng, std::size_t dim,
                                    const SourceId& source) {
    auto draw = [&] {
        std::vector<double> v(dim);
        for (auto& x : v) {
            x = static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
        }
        return v;
    };
    return make_embeddings(source, draw(), draw(), draw());
}

}  // namespace

TEST_CASE("cosine matches the frozen hand-computed value") {
    EmbeddingVector u{{1, 2, 3}};
    EmbeddingVector v{{4, 5, 6}};
    // 32 / (sqrt(14) * sqrt(77))
    CHECK(cosine(u, v) == doctest::Approx(0.9746318461970762).epsilon(1e-12));
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine rejects malformed input") {
    EmbeddingVector u{{1, 2}};
    EmbeddingVector v{{1, 2, 3}};
    EmbeddingVector zero{{0, 0}};
    EmbeddingVector empty;
    CHECK_THROWS_AS(cosine(u, v), std::runtime_error);
    CHECK_THROWS_AS(cosine(u, zero), std::runtime_error);
    CHECK_THROWS_AS(cosine(empty, empty), std::runtime_error);
}

TEST_CASE("fused similarity averages person and scene") {
    // person contexts orthogonal (cos 0), scene contexts identical (cos 1)
    ContextEmbeddings q = make_embeddings({"q", "p"}, {1, 0}, {1, 1}, {1, 0});
    ContextEmbeddings c = make_embeddings({"c", "p"}, {0, 1}, {1, 1}, {1, 0});
    SimilarityScore s = fused_similarity(q, c);
    CHECK(s.person_sim == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.scene_sim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.fused == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rank_candidates orders by the mode's score") {
    ContextEmbeddings q = make_embeddings({"q", "p"}, {1, 0}, {1, 0}, {1, 0});
    std::vector<ContextEmbeddings> candidates = {
        // fused: (0 + 1)/2 = 0.5, overall: 1
        make_embeddings({"a", "p"}, {0, 1}, {1, 0}, {1, 0}),
        // fused: (1 + 1)/2 = 1.0, overall: 0
        make_embeddings({"b", "p"}, {1, 0}, {1, 0}, {0, 1}),
        // fused: (0 + 0)/2 = 0.0, overall: 0
        make_embeddings({"c", "p"}, {0, 1}, {0, 1}, {0, 1}),
    };

    Ranking fused = rank_candidates(q, candidates, RetrievalMode::fused);
    CHECK(fused.ordered_indices == std::vector<std::size_t>{1, 0, 2});

    Ranking overall = rank_candidates(q, candidates, RetrievalMode::overall);
    CHECK(overall.ordered_indices[0] == 0);

    Ranking person = rank_candidates(q, candidates, RetrievalMode::person_only);
    CHECK(person.ordered_indices[0] == 1);

    Ranking scene = rank_candidates(q, candidates, RetrievalMode::scene_only);
    // candidates 0 and 1 tie on scene similarity: ascending index wins
    CHECK(scene.ordered_indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("exact ties break by ascending candidate index") {
    ContextEmbeddings q = make_embeddings({"q", "p"}, {1, 1}, {1, 1}, {1, 1});
    std::vector<ContextEmbeddings> candidates(4, q);
    candidates[0].source = {"c0", "p"};
    candidates[1].source = {"c1", "p"};
    candidates[2].source = {"c2", "p"};
    candidates[3].source = {"c3", "p"};

    Ranking r = rank_candidates(q, candidates, RetrievalMode::fused);
    CHECK(r.ordered_indices == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("random mode is a reproducible per-query shuffle") {
    std::mt19937_64 rng(3);
    ContextEmbeddings q1 = random_embeddings(rng, 4, {"q1", "p"});
    ContextEmbeddings q2 = random_embeddings(rng, 4, {"q2", "p"});
    std::vector<ContextEmbeddings> candidates;
    for (int i = 0; i < 12; ++i) {
        candidates.push_back(random_embeddings(rng, 4, {"c" + std::to_string(i), "p"}));
    }

    Ranking a = rank_candidates(q1, candidates, RetrievalMode::random, 7);
    Ranking b = rank_candidates(q1, candidates, RetrievalMode::random, 7);
    CHECK(a.ordered_indices == b.ordered_indices);

    std::vector<std::size_t> sorted = a.ordered_indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(12);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);

    Ranking other_query = rank_candidates(q2, candidates, RetrievalMode::random, 7);
    CHECK(other_query.ordered_indices != a.ordered_indices);

    Ranking other_seed = rank_candidates(q1, candidates, RetrievalMode::random, 8);
    CHECK(other_seed.ordered_indices != a.ordered_indices);

    // the descending-score invariant holds even for the placeholder scores
    for (std::size_t pos = 1; pos < a.ordered_indices.size(); ++pos) {
        CHECK(a.scores[a.ordered_indices[pos - 1]].fused >
              a.scores[a.ordered_indices[pos]].fused);
    }
}

TEST_CASE("top_k prefixes nest and same-image candidates are excluded") {
    std::mt19937_64 rng(5);
    ContextEmbeddings q = random_embeddings(rng, 6, {"shared", "p0"});
    std::vector<ContextEmbeddings> candidates;
    for (int i = 0; i < 10; ++i) {
        candidates.push_back(random_embeddings(rng, 6, {"c" + std::to_string(i), "p"}));
    }
    candidates[4].source = {"shared", "p1"};  // same image as the query

    Ranking r = rank_candidates(q, candidates, RetrievalMode::fused);

    auto top2 = top_k(r, 2, "shared");
    auto top5 = top_k(r, 5, "shared");
    REQUIRE(top5.size() == 5);
    CHECK(std::equal(top2.begin(), top2.end(), top5.begin()));

    for (std::size_t idx : top5) CHECK(idx != 4);

    // k larger than the filtered pool: everything else, still ordered
    auto all = top_k(r, 100, "shared");
    CHECK(all.size() == 9);

    auto unfiltered = top_k(r, 10, "elsewhere");
    CHECK(unfiltered.size() == 10);
    CHECK(unfiltered == r.ordered_indices);
}

TEST_CASE("rankings survive uniform scaling of all embeddings") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        ContextEmbeddings q = random_embeddings(rng, 8, {"q", "p"});
        std::vector<ContextEmbeddings> candidates;
        for (int i = 0; i < 20; ++i) {
            candidates.push_back(random_embeddings(rng, 8, {"c" + std::to_string(i), "p"}));
        }
        Ranking base = rank_candidates(q, candidates, RetrievalMode::fused);

        for (double alpha : {0.01, 100.0}) {
            ContextEmbeddings qs = q;
            std::vector<ContextEmbeddings> cs = candidates;
            auto scale = [&](EmbeddingVector& v) {
                for (double& x : v.values) x *= alpha;
            };
            scale(qs.person);
            scale(qs.scene);
            scale(qs.overall);
            for (auto& c : cs) {
                scale(c.person);
                scale(c.scene);
                scale(c.overall);
            }
            Ranking scaled = rank_candidates(qs, cs, RetrievalMode::fused);
            CHECK(scaled.ordered_indices == base.ordered_indices);
        }
    }
}

TEST_CASE("rank_candidates rejects an empty candidate set") {
    ContextEmbeddings q = make_embeddings({"q", "p"}, {1}, {1}, {1});
    CHECK_THROWS_AS(rank_candidates(q, {}, RetrievalMode::fused), std::runtime_error);
}
