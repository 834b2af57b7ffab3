#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "caer/image.hpp"
#include "caer/types.hpp"

namespace caer {

// Parameters for a self-contained on-disk dataset of noise images: PNGs,
// train/test annotation JSONL and a vocabulary file. Everything derives from
// the seed, so fixtures regenerate identically anywhere.
struct SyntheticSpec {
    std::string root_dir;
    std::size_t n_train = 40;
    std::size_t n_test = 20;
    int width = 48;
    int height = 36;
    std::uint64_t seed = 1;
    bool multi_label = false;
    // Empty -> the 8 basic emotion labels.
    std::vector<std::string> labels;
};

struct SyntheticFixture {
    std::string train_annotations;
    std::string test_annotations;
    std::string vocab_path;
};

Image random_image(int width, int height, std::uint64_t seed);

// Box of at least 1x1 strictly inside the image.
BoundingBox random_bbox(int width, int height, std::mt19937_64& rng);

SyntheticFixture make_fixture(const SyntheticSpec& spec);

}  // namespace caer
