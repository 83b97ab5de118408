#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mldas/errors.hpp"

namespace mldas {

/// Root mean square error: sqrt((1/m) * sum((h_i - y_i)^2)).
inline double rmse(std::span<const double> predictions, std::span<const double> labels) {
    if (predictions.size() != labels.size()) {
        throw ArgumentError("rmse: length mismatch (" + std::to_string(predictions.size()) + " vs " +
                            std::to_string(labels.size()) + ")");
    }
    if (predictions.empty()) throw ArgumentError("rmse: empty vectors");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double diff = predictions[i] - labels[i];
        sum_sq += diff * diff;
    }
    return std::sqrt(sum_sq / double(predictions.size()));
}

/// Detection metrics computed from the binary confusion matrix.
/// All 0/0 ratios resolve to 0.
struct EvalReport {
    double rmse = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
};

inline EvalReport confusion_report(std::span<const double> predicted_classes,
                                   std::span<const double> labels) {
    if (predicted_classes.size() != labels.size() || labels.empty()) {
        throw ArgumentError("confusion_report: bad input lengths");
    }
    EvalReport r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred = predicted_classes[i] >= 0.5;
        const bool truth = labels[i] >= 0.5;
        if (pred && truth) ++r.tp;
        else if (pred && !truth) ++r.fp;
        else if (!pred && truth) ++r.fn;
        else ++r.tn;
    }
    const auto ratio = [](std::int64_t num, std::int64_t den) {
        return den == 0 ? 0.0 : double(num) / double(den);
    };
    r.accuracy = ratio(r.tp + r.tn, r.tp + r.fp + r.tn + r.fn);
    r.precision = ratio(r.tp, r.tp + r.fp);
    r.recall = ratio(r.tp, r.tp + r.fn);
    r.fpr = ratio(r.fp, r.fp + r.tn);
    r.fnr = ratio(r.fn, r.fn + r.tp);
    r.f1 = (r.precision + r.recall) == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

}  // namespace mldas
