#include "caer/synthetic.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "caer/dataset.hpp"
#include "caer/image_io.hpp"
#include "caer/util.hpp"

namespace caer {

namespace fs = std::filesystem;

Image random_image(int width, int height, std::uint64_t seed) {
    Image image = Image::blank(width, height);
    std::mt19937_64 rng(seed);
    for (auto& byte : image.pixels) byte = static_cast<std::uint8_t>(rng() & 0xFF);
    return image;
}

BoundingBox random_bbox(int width, int height, std::mt19937_64& rng) {
    int bw = 1 + static_cast<int>(bounded_rand(rng, static_cast<std::uint64_t>(width)));
    int bh = 1 + static_cast<int>(bounded_rand(rng, static_cast<std::uint64_t>(height)));
    int x = static_cast<int>(bounded_rand(rng, static_cast<std::uint64_t>(width - bw + 1)));
    int y = static_cast<int>(bounded_rand(rng, static_cast<std::uint64_t>(height - bh + 1)));
    return {x, y, x + bw, y + bh};
}

namespace {

const std::vector<std::string> kDefaultLabels = {
    "Surprise", "Excitement", "Happiness", "Peace",
    "Disgust", "Anger", "Fear", "Sadness",
};

LabelSet random_labels(std::mt19937_64& rng, std::size_t n_labels, bool multi_label) {
    if (!multi_label) {
        return {static_cast<std::size_t>(bounded_rand(rng, n_labels))};
    }
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < n_labels; ++i) {
        if (bounded_rand(rng, 4) == 0) picked.push_back(i);  // ~25% per label
    }
    if (picked.empty()) picked.push_back(static_cast<std::size_t>(bounded_rand(rng, n_labels)));
    return make_label_set(std::move(picked));
}

Corpus make_split(const SyntheticSpec& spec, const LabelVocabulary& vocab, Split split,
                  std::size_t n, const fs::path& image_dir, std::mt19937_64& rng) {
    Corpus corpus;
    corpus.vocabulary = vocab;
    corpus.split = split;
    const std::string prefix = split_name(split);
    for (std::size_t i = 0; i < n; ++i) {
        AnnotatedPerson agent;
        char number[24];
        std::snprintf(number, sizeof number, "%04zu", i);
        agent.image_id = prefix + "_" + number;
        fs::path image_path = image_dir / (agent.image_id + ".png");
        agent.image_path = image_path.string();
        agent.person_id = "p0";
        agent.bbox = random_bbox(spec.width, spec.height, rng);
        agent.labels = random_labels(rng, vocab.size(), vocab.multi_label());
        save_png(random_image(spec.width, spec.height, rng()), agent.image_path);
        corpus.persons.push_back(std::move(agent));
    }
    return corpus;
}

}  // namespace

SyntheticFixture make_fixture(const SyntheticSpec& spec) {
    if (spec.root_dir.empty()) throw std::invalid_argument("fixture needs a root_dir");
    if (spec.width < 4 || spec.height < 4) {
        throw std::invalid_argument("fixture images must be at least 4x4");
    }
    const fs::path root(spec.root_dir);
    const fs::path image_dir = root / "images";
    fs::create_directories(image_dir);

    const std::vector<std::string>& labels =
        spec.labels.empty() ? kDefaultLabels : spec.labels;
    LabelVocabulary vocab("synthetic", labels, spec.multi_label);

    SyntheticFixture fixture;
    fixture.vocab_path = (root / "vocab.txt").string();
    std::ofstream vocab_out(fixture.vocab_path, std::ios::binary);
    if (!vocab_out) throw std::runtime_error("cannot write " + fixture.vocab_path);
    vocab_out << "#multi_label=" << (spec.multi_label ? "true" : "false") << "\n";
    for (const auto& label : labels) vocab_out << label << "\n";
    vocab_out.close();

    std::mt19937_64 rng(spec.seed);
    Corpus train = make_split(spec, vocab, Split::train, spec.n_train, image_dir, rng);
    Corpus test = make_split(spec, vocab, Split::test, spec.n_test, image_dir, rng);

    fixture.train_annotations = (root / "train.jsonl").string();
    fixture.test_annotations = (root / "test.jsonl").string();
    save_corpus(train, fixture.train_annotations);
    save_corpus(test, fixture.test_annotations);
    return fixture;
}

}  // namespace caer
