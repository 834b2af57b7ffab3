#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "caer/types.hpp"

namespace caer {

// Per-class confusion counters plus the per-sample tallies the aggregate
// metrics need. Accumulation is a commutative fold: partial counts from
// parallel shards merge by addition.
struct ConfusionCounts {
    ConfusionCounts() = default;
    explicit ConfusionCounts(std::size_t n_labels)
        : tp(n_labels, 0), fp(n_labels, 0), fn(n_labels, 0), tn(n_labels, 0) {}

    std::vector<std::uint64_t> tp, fp, fn, tn;
    std::uint64_t n_samples = 0;
    std::uint64_t n_exact = 0;
    // single-label accuracy is defined only while every gt and pred is a singleton
    bool all_singletons = true;
    std::uint64_t n_singleton_correct = 0;

    std::size_t n_labels() const { return tp.size(); }
    void merge(const ConfusionCounts& other);
};

void accumulate(const LabelSet& gt, const LabelSet& pred, ConfusionCounts& counts);

struct PerClassMetrics {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::uint64_t support = 0;  // tp + fn
    double precision = 0.0, recall = 0.0, f1 = 0.0;

    bool operator==(const PerClassMetrics&) const = default;
};

struct MetricsReport {
    double micro_p = 0.0, micro_r = 0.0, micro_f1 = 0.0;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    double hamming_loss = 0.0;
    double exact_match_accuracy = 0.0;
    std::optional<double> single_label_accuracy;
    std::vector<PerClassMetrics> per_class;

    bool operator==(const MetricsReport&) const = default;
};

// All 0/0 ratios are 0. Macro averages run over every class; with
// include_zero_support=false, classes that never appear in the ground truth
// are excluded from the average instead.
MetricsReport finalize(const ConfusionCounts& counts, bool include_zero_support = true);

nlohmann::ordered_json report_json(const MetricsReport& report,
                                   const LabelVocabulary& vocab);

// Aligned table: Precision, Recall, F1 as micro/macro percent pairs, then
// Hamming and exact-match accuracy.
std::string report_table(const MetricsReport& report, const LabelVocabulary& vocab);

}  // namespace caer
