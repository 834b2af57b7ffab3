#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caer/types.hpp"

namespace caer {

// Vocabulary file: UTF-8, header line `#multi_label=true|false`, then one
// label per line in class-id order. Blank lines are ignored. The vocabulary
// name is the file stem.
LabelVocabulary load_vocabulary(const std::string& vocab_path);

// Annotation file: JSONL, one agent per line:
//   {"image_id": str, "image_path": str, "person_id": str,
//    "bbox": [x_min, y_min, x_max, y_max], "labels": [str, ...]}
// Errors report the offending line number. Image decodability is checked
// lazily at extraction time, not here.
Corpus load_corpus(const std::string& annotation_path, const std::string& vocab_path,
                   Split split = Split::train);

// Writes the canonical JSONL form; load_corpus(save_corpus(c)) == c.
void save_corpus(const Corpus& corpus, const std::string& annotation_path);

// Samples n distinct persons via a seeded Fisher-Yates permutation
// (mt19937_64 + rejection-sampled bounds, see util.hpp), so the same
// (corpus, n, seed) reproduces on any machine. Throws if n > corpus size.
std::vector<AnnotatedPerson> sample_candidates(const Corpus& corpus, std::size_t n,
                                               std::uint64_t seed);

}  // namespace caer
