#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "caer/util.hpp"

using namespace caer;

TEST_CASE("fnv1a64 matches the published test vectors") {
    // Offset basis for the empty input, then the classic single-char vectors.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a64 chains through the seed parameter") {
    CHECK(fnv1a64("bar", fnv1a64("foo")) == fnv1a64("foobar"));
}

TEST_CASE("bounded_rand stays in range and reproduces") {
    std::mt19937_64 a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t x = bounded_rand(a, 7);
        CHECK(x < 7);
        CHECK(x == bounded_rand(b, 7));
    }
}

TEST_CASE("deterministic_shuffle permutes and reproduces") {
    std::vector<int> first(25), second(25);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), 0);

    std::mt19937_64 a(7), b(7);
    deterministic_shuffle(first, a);
    deterministic_shuffle(second, b);
    CHECK(first == second);

    std::vector<int> sorted = first;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expected(25);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);

    std::vector<int> other(25);
    std::iota(other.begin(), other.end(), 0);
    std::mt19937_64 c(8);
    deterministic_shuffle(other, c);
    CHECK(other != first);
}

TEST_CASE("string helpers") {
    CHECK(trim("  x y\t\n") == "x y");
    CHECK(trim("") == "");
    CHECK(to_lower("HaPpInEsS") == "happiness");
    CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(starts_with_ci("Rationale: because", "rationale:"));
    CHECK_FALSE(starts_with_ci("Ration", "rationale:"));
}

TEST_CASE("base64 of known bytes") {
    const std::vector<std::uint8_t> man = {'M', 'a', 'n'};
    CHECK(base64_encode(man) == "TWFu");
    const std::vector<std::uint8_t> pad1 = {'M', 'a'};
    CHECK(base64_encode(pad1) == "TWE=");
    const std::vector<std::uint8_t> pad2 = {'M'};
    CHECK(base64_encode(pad2) == "TQ==");
}
