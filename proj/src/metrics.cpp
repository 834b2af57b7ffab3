#include "caer/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace caer {

using json = nlohmann::ordered_json;

void ConfusionCounts::merge(const ConfusionCounts& other) {
    if (other.n_labels() != n_labels()) {
        throw std::invalid_argument("cannot merge counts over different label spaces");
    }
    for (std::size_t c = 0; c < n_labels(); ++c) {
        tp[c] += other.tp[c];
        fp[c] += other.fp[c];
        fn[c] += other.fn[c];
        tn[c] += other.tn[c];
    }
    n_samples += other.n_samples;
    n_exact += other.n_exact;
    all_singletons = all_singletons && other.all_singletons;
    n_singleton_correct += other.n_singleton_correct;
}

void accumulate(const LabelSet& gt, const LabelSet& pred, ConfusionCounts& counts) {
    const std::size_t n = counts.n_labels();
    for (std::size_t id : gt) {
        if (id >= n) throw std::out_of_range("gt label index " + std::to_string(id));
    }
    for (std::size_t id : pred) {
        if (id >= n) throw std::out_of_range("pred label index " + std::to_string(id));
    }
    // LabelSets are sorted, so membership is a binary search.
    auto has = [](const LabelSet& s, std::size_t id) {
        return std::binary_search(s.begin(), s.end(), id);
    };
    for (std::size_t c = 0; c < n; ++c) {
        bool in_gt = has(gt, c);
        bool in_pred = has(pred, c);
        if (in_gt && in_pred) ++counts.tp[c];
        else if (in_pred) ++counts.fp[c];
        else if (in_gt) ++counts.fn[c];
        else ++counts.tn[c];
    }
    ++counts.n_samples;
    if (gt == pred) ++counts.n_exact;
    if (gt.size() == 1 && pred.size() == 1) {
        if (gt == pred) ++counts.n_singleton_correct;
    } else {
        counts.all_singletons = false;
    }
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_of(double p, double r) { return ratio(2.0 * p * r, p + r); }

}  // namespace

MetricsReport finalize(const ConfusionCounts& counts, bool include_zero_support) {
    if (counts.n_samples == 0) throw std::invalid_argument("empty evaluation set");

    MetricsReport report;
    const std::size_t n = counts.n_labels();
    report.per_class.resize(n);

    std::uint64_t sum_tp = 0, sum_fp = 0, sum_fn = 0;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    std::size_t macro_classes = 0;
    for (std::size_t c = 0; c < n; ++c) {
        PerClassMetrics& pc = report.per_class[c];
        pc.tp = counts.tp[c];
        pc.fp = counts.fp[c];
        pc.fn = counts.fn[c];
        pc.tn = counts.tn[c];
        pc.support = pc.tp + pc.fn;
        pc.precision = ratio(static_cast<double>(pc.tp), static_cast<double>(pc.tp + pc.fp));
        pc.recall = ratio(static_cast<double>(pc.tp), static_cast<double>(pc.support));
        pc.f1 = f1_of(pc.precision, pc.recall);
        sum_tp += pc.tp;
        sum_fp += pc.fp;
        sum_fn += pc.fn;
        if (include_zero_support || pc.support > 0) {
            macro_p += pc.precision;
            macro_r += pc.recall;
            macro_f1 += pc.f1;
            ++macro_classes;
        }
    }

    report.micro_p = ratio(static_cast<double>(sum_tp), static_cast<double>(sum_tp + sum_fp));
    report.micro_r = ratio(static_cast<double>(sum_tp), static_cast<double>(sum_tp + sum_fn));
    report.micro_f1 = f1_of(report.micro_p, report.micro_r);
    report.macro_p = ratio(macro_p, static_cast<double>(macro_classes));
    report.macro_r = ratio(macro_r, static_cast<double>(macro_classes));
    report.macro_f1 = ratio(macro_f1, static_cast<double>(macro_classes));
    // Every (sample, class) disagreement is exactly one fp or fn.
    report.hamming_loss = ratio(static_cast<double>(sum_fp + sum_fn),
                                static_cast<double>(counts.n_samples * n));
    report.exact_match_accuracy =
        static_cast<double>(counts.n_exact) / static_cast<double>(counts.n_samples);
    if (counts.all_singletons) {
        report.single_label_accuracy = static_cast<double>(counts.n_singleton_correct) /
                                       static_cast<double>(counts.n_samples);
    }
    return report;
}

json report_json(const MetricsReport& report, const LabelVocabulary& vocab) {
    json per_class = json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const PerClassMetrics& pc = report.per_class[c];
        per_class.push_back({
            {"label", vocab.label(c)},
            {"tp", pc.tp},
            {"fp", pc.fp},
            {"fn", pc.fn},
            {"tn", pc.tn},
            {"support", pc.support},
            {"precision", pc.precision},
            {"recall", pc.recall},
            {"f1", pc.f1},
        });
    }
    json out = {
        {"micro", {{"precision", report.micro_p}, {"recall", report.micro_r}, {"f1", report.micro_f1}}},
        {"macro", {{"precision", report.macro_p}, {"recall", report.macro_r}, {"f1", report.macro_f1}}},
        {"hamming_loss", report.hamming_loss},
        {"exact_match_accuracy", report.exact_match_accuracy},
        {"per_class", per_class},
    };
    if (report.single_label_accuracy) {
        out["single_label_accuracy"] = *report.single_label_accuracy;
    }
    return out;
}

std::string report_table(const MetricsReport& report, const LabelVocabulary& vocab) {
    auto pair = [](double micro, double macro) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.2f/%.2f", micro * 100.0, macro * 100.0);
        return std::string(buf);
    };
    auto pct = [](double v) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
        return std::string(buf);
    };
    char hamming[24];
    std::snprintf(hamming, sizeof hamming, "%.4f", report.hamming_loss);

    std::string header, values;
    auto column = [&](const std::string& title, const std::string& value) {
        std::size_t width = std::max(title.size(), value.size()) + 2;
        header += title + std::string(width - title.size(), ' ');
        values += value + std::string(width - value.size(), ' ');
    };
    column("Precision", pair(report.micro_p, report.macro_p));
    column("Recall", pair(report.micro_r, report.macro_r));
    column("F1", pair(report.micro_f1, report.macro_f1));
    column("Hamming", hamming);
    column("Accuracy", pct(report.exact_match_accuracy));
    if (report.single_label_accuracy) {
        column("SingleLabelAcc", pct(*report.single_label_accuracy));
    }

    std::string out = vocab.name() + " (micro/macro)\n" + header + "\n" + values + "\n";
    while (out.find(" \n") != std::string::npos) {
        out.erase(out.find(" \n"), 1);
    }
    return out;
}

}  // namespace caer
