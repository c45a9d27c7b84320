#pragma once

// Evaluation statistics for predicted severity scores against ground truth:
// Pearson/Spearman correlation, MAE and signed bias, level accuracy with a
// confusion matrix, and curated inter-/intra-level pairwise ranking accuracy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cprt/error.hpp"
#include "cprt/parallel.hpp"
#include "cprt/rng.hpp"
#include "cprt/scoring.hpp"
#include "cprt/taxonomy.hpp"

namespace cprt {

struct EvaluationRecord {
    std::string image_id;
    double gt_score = 0.0;
    std::optional<SeverityLevel> gt_level; // nullopt = no attribute present
    double pred_score = 0.0;
};

// Attribute-free images occupy the lowest-risk bucket for level metrics.
inline SeverityLevel effective_level(const std::optional<SeverityLevel>& level) {
    return level.value_or(SeverityLevel::L4);
}

namespace detail {

inline void require_same_nonempty(std::size_t a, std::size_t b) {
    if (a != b) raise(errc::length_mismatch, "sequences differ in length");
    if (a == 0) raise(errc::empty_input, "empty sequences");
}

} // namespace detail

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_same_nonempty(x.size(), y.size());
    if (x.size() < 2) raise(errc::empty_input, "correlation needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        raise(errc::constant_input, "correlation undefined for constant input");
    }
    return sxy / std::sqrt(sxx * syy);
}

// Fractional ranks, 1-based; ties share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_same_nonempty(x.size(), y.size());
    if (x.size() < 2) raise(errc::empty_input, "correlation needs >= 2 points");
    return pearson(average_ranks(x), average_ranks(y));
}

inline std::pair<double, double> mae_and_bias(const std::vector<double>& pred,
                                              const std::vector<double>& gt) {
    detail::require_same_nonempty(pred.size(), gt.size());
    double abs_sum = 0.0, signed_sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred[i] - gt[i];
        abs_sum += std::abs(diff);
        signed_sum += diff;
    }
    const double n = static_cast<double>(pred.size());
    return {abs_sum / n, signed_sum / n};
}

enum class PairMode { inter, intra };

using IndexPair = std::pair<std::size_t, std::size_t>;

// Eligible pairs: inter = different effective levels; intra = same level but
// different gt scores. Exhaustive when the eligible set fits max_pairs, else
// a seeded uniform sample without replacement.
inline std::vector<IndexPair> curate_pairs(
    const std::vector<EvaluationRecord>& records, PairMode mode,
    std::size_t max_pairs = 10000, uint64_t seed = 0) {
    if (records.size() < 2) {
        raise(errc::no_eligible_pairs, "need >= 2 records to form pairs");
    }
    std::vector<IndexPair> eligible;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = i + 1; j < records.size(); ++j) {
            const bool same_level = effective_level(records[i].gt_level) ==
                                    effective_level(records[j].gt_level);
            const bool keep = mode == PairMode::inter
                                  ? !same_level
                                  : same_level && records[i].gt_score !=
                                                      records[j].gt_score;
            if (keep) eligible.emplace_back(i, j);
        }
    }
    if (eligible.empty()) {
        raise(errc::no_eligible_pairs,
              mode == PairMode::inter ? "no cross-level pairs exist"
                                      : "no within-level score-distinct pairs exist");
    }
    if (eligible.size() <= max_pairs) return eligible;

    DeterministicRng rng(derive_seed(seed, mode == PairMode::inter ? 1 : 2));
    for (std::size_t i = 0; i < max_pairs; ++i) {
        const std::size_t j = i + rng.uniform_index(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(max_pairs);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

// Fraction of pairs whose score differences have strictly positive product;
// a predicted tie never counts as concordant.
inline double pairwise_accuracy(const std::vector<IndexPair>& pairs,
                                const std::vector<EvaluationRecord>& records) {
    if (pairs.empty()) raise(errc::empty_pairs, "no pairs to evaluate");
    std::size_t concordant = 0;
    for (const auto& [i, j] : pairs) {
        const double gt_diff = records[i].gt_score - records[j].gt_score;
        if (gt_diff == 0.0) {
            raise(errc::tied_ground_truth,
                  "pair (" + records[i].image_id + ", " + records[j].image_id +
                      ") has tied ground-truth scores");
        }
        if (gt_diff * (records[i].pred_score - records[j].pred_score) > 0.0) {
            ++concordant;
        }
    }
    return static_cast<double>(concordant) / static_cast<double>(pairs.size());
}

inline double level_accuracy(const std::vector<EvaluationRecord>& records,
                             const BoundarySet& boundaries) {
    if (records.empty()) raise(errc::empty_input, "no records");
    std::size_t correct = 0;
    for (const auto& rec : records) {
        if (bucketize(rec.pred_score, boundaries) == effective_level(rec.gt_level)) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

// Rows: ground-truth L1..L4 plus a separate row for attribute-free records;
// columns: bucketized prediction. The effective diagonal counts the None row
// as L4, so trace/n equals level_accuracy.
struct ConfusionMatrix {
    static constexpr std::size_t kRows = 5; // L1..L4 + None
    static constexpr std::size_t kCols = 4;
    std::array<std::array<int64_t, kCols>, kRows> cells{};

    int64_t total() const {
        int64_t n = 0;
        for (const auto& row : cells) {
            for (int64_t c : row) n += c;
        }
        return n;
    }

    int64_t effective_trace() const {
        int64_t t = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            t += cells[i][i];
        }
        return t + cells[4][3];
    }
};

inline ConfusionMatrix confusion_matrix(const std::vector<EvaluationRecord>& records,
                                        const BoundarySet& boundaries) {
    if (records.empty()) raise(errc::empty_input, "no records");
    ConfusionMatrix matrix;
    for (const auto& rec : records) {
        const std::size_t row =
            rec.gt_level ? static_cast<std::size_t>(level_index(*rec.gt_level) - 1)
                         : std::size_t{4};
        const std::size_t col = static_cast<std::size_t>(
            level_index(bucketize(rec.pred_score, boundaries)) - 1);
        ++matrix.cells[row][col];
    }
    return matrix;
}

struct MetricsReport {
    std::optional<double> pearson;  // absent when an input is constant
    std::optional<double> spearman; // absent when ranks are constant
    double mae = 0.0;
    double bias = 0.0;
    double level_accuracy = 0.0;
    std::optional<double> inter_acc; // absent when no eligible pairs
    std::optional<double> intra_acc;
    ConfusionMatrix confusion;
    std::size_t n = 0;
    std::size_t inter_pairs = 0;
    std::size_t intra_pairs = 0;
    uint64_t seed = 0;
    std::size_t max_pairs = 0;
};

// Full metric bundle. Per-record work runs on the worker pool into indexed
// slots; every reduction is a fixed-order sequential pass, so the report is
// identical for any thread count.
inline MetricsReport compute_metrics(const std::vector<EvaluationRecord>& records,
                                     const BoundarySet& boundaries,
                                     uint64_t seed = 0,
                                     std::size_t max_pairs = 10000,
                                     int threads = 1) {
    if (records.empty()) raise(errc::empty_input, "no records to evaluate");
    MetricsReport report;
    report.n = records.size();
    report.seed = seed;
    report.max_pairs = max_pairs;

    std::vector<double> pred(records.size()), gt(records.size());
    std::vector<uint8_t> pred_level(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) {
        pred[i] = records[i].pred_score;
        gt[i] = records[i].gt_score;
        pred_level[i] = static_cast<uint8_t>(
            level_index(bucketize(records[i].pred_score, boundaries)));
    });

    try {
        report.pearson = pearson(pred, gt);
    } catch (const Error& e) {
        if (e.code() != errc::constant_input) throw;
    }
    try {
        report.spearman = spearman(pred, gt);
    } catch (const Error& e) {
        if (e.code() != errc::constant_input) throw;
    }
    std::tie(report.mae, report.bias) = mae_and_bias(pred, gt);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t row =
            records[i].gt_level
                ? static_cast<std::size_t>(level_index(*records[i].gt_level) - 1)
                : std::size_t{4};
        ++report.confusion.cells[row][static_cast<std::size_t>(pred_level[i] - 1)];
        if (static_cast<int>(pred_level[i]) ==
            level_index(effective_level(records[i].gt_level))) {
            ++correct;
        }
    }
    report.level_accuracy =
        static_cast<double>(correct) / static_cast<double>(records.size());

    for (PairMode mode : {PairMode::inter, PairMode::intra}) {
        try {
            const auto pairs = curate_pairs(records, mode, max_pairs, seed);
            const double acc = pairwise_accuracy(pairs, records);
            if (mode == PairMode::inter) {
                report.inter_acc = acc;
                report.inter_pairs = pairs.size();
            } else {
                report.intra_acc = acc;
                report.intra_pairs = pairs.size();
            }
        } catch (const Error& e) {
            if (e.code() != errc::no_eligible_pairs) throw;
        }
    }
    return report;
}

} // namespace cprt
