#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tabsyn/errors.hpp"

namespace tabsyn {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    double accuracy() const {
        return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
    }
    // Counts for the other class: positives and negatives swap roles.
    ConfusionCounts flipped() const { return {tn, fn, fp, tp}; }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    // Set when a zero denominator forced the corresponding metric to 0.
    bool degenerate = false;
};

struct WeightedReport {
    ClassMetrics fire;     // designated positive class
    ClassMetrics nofire;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    // Equals weighted recall: sum_c S_c * (tp_c / S_c) / N = (correct) / N.
    double accuracy = 0.0;
};

template <typename Label>
ConfusionCounts confusion(const std::vector<Label>& pred, const std::vector<Label>& truth,
                          const Label& positive) {
    if (pred.size() != truth.size())
        throw LengthMismatch("confusion: " + std::to_string(pred.size()) + " predictions vs " +
                             std::to_string(truth.size()) + " truths");
    if (pred.empty()) throw LengthMismatch("confusion: empty inputs");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == positive;
        const bool t = truth[i] == positive;
        if (p && t)
            ++c.tp;
        else if (p && !t)
            ++c.fp;
        else if (!p && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

// Precision = tp/(tp+fp), Recall = tp/(tp+fn), F1 = 2PR/(P+R).
// Zero denominators yield 0 with the degenerate flag set, never NaN.
inline ClassMetrics class_metrics(const ConfusionCounts& c) {
    ClassMetrics m;
    m.support = c.tp + c.fn;
    if (c.tp + c.fp == 0) {
        m.precision = 0.0;
        m.degenerate = true;
    } else {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn == 0) {
        m.recall = 0.0;
        m.degenerate = true;
    } else {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (m.precision + m.recall == 0.0) {
        m.f1 = 0.0;
        m.degenerate = true;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

// Support-weighted average of the per-class metrics:
//   P = (S_F * P_F + S_NF * P_NF) / (S_F + S_NF), likewise recall and F1.
inline WeightedReport weighted_report(const ClassMetrics& fire, const ClassMetrics& nofire) {
    const double s_f = static_cast<double>(fire.support);
    const double s_nf = static_cast<double>(nofire.support);
    if (fire.support + nofire.support == 0)
        throw ZeroSupport("weighted_report: no samples in either class");
    WeightedReport r;
    r.fire = fire;
    r.nofire = nofire;
    const double total = s_f + s_nf;
    r.weighted_precision = (s_f * fire.precision + s_nf * nofire.precision) / total;
    r.weighted_recall = (s_f * fire.recall + s_nf * nofire.recall) / total;
    r.weighted_f1 = (s_f * fire.f1 + s_nf * nofire.f1) / total;
    r.accuracy = r.weighted_recall;
    return r;
}

// Convenience: full report straight from label vectors.
template <typename Label>
WeightedReport weighted_report(const std::vector<Label>& pred, const std::vector<Label>& truth,
                               const Label& positive) {
    const ConfusionCounts c = confusion(pred, truth, positive);
    WeightedReport r = weighted_report(class_metrics(c), class_metrics(c.flipped()));
    r.accuracy = c.accuracy();
    return r;
}

}  // namespace tabsyn
