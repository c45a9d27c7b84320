#pragma once

// Three-valued annotation labels, their aggregation into binary ground-truth
// vectors, and inter-annotator agreement statistics. Ambiguous labels (0.5)
// binarize to 0; dual-annotator merge keeps a 1 only on exact agreement.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cprt/error.hpp"

namespace cprt {

enum class Label : int { absent = 0, ambiguous = 1, present = 2 };

inline double label_value(Label label) {
    switch (label) {
        case Label::absent: return 0.0;
        case Label::ambiguous: return 0.5;
        case Label::present: return 1.0;
    }
    raise(errc::bad_label_value, "corrupt label enum");
}

inline Label label_from_value(double value) {
    if (value == 0.0) return Label::absent;
    if (value == 0.5) return Label::ambiguous;
    if (value == 1.0) return Label::present;
    raise(errc::bad_label_value,
          "label " + std::to_string(value) + " not in {0, 0.5, 1}");
}

inline uint8_t binarize(Label label) {
    return label == Label::present ? uint8_t{1} : uint8_t{0};
}

inline std::vector<uint8_t> binarize(const std::vector<Label>& labels) {
    std::vector<uint8_t> bits(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = binarize(labels[i]);
    return bits;
}

struct AnnotationRecord {
    std::string image_id;
    std::string annotator_id;
    std::vector<Label> labels;           // one entry per registry attribute
    std::vector<std::string> rationales; // empty, or aligned with labels
};

// 1 iff both annotators give exactly 1; ambiguity or disagreement drops to 0.
inline std::vector<uint8_t> merge_dual(const AnnotationRecord& a,
                                       const AnnotationRecord& b) {
    if (a.image_id != b.image_id) {
        raise(errc::id_mismatch,
              "cannot merge annotations for '" + a.image_id + "' and '" +
                  b.image_id + "'");
    }
    if (a.labels.size() != b.labels.size()) {
        raise(errc::length_mismatch, "annotation label vectors differ in length");
    }
    std::vector<uint8_t> merged(a.labels.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        merged[i] = (a.labels[i] == Label::present && b.labels[i] == Label::present)
                        ? uint8_t{1}
                        : uint8_t{0};
    }
    return merged;
}

// Strict majority of 1s; even splits and minorities yield 0.
inline uint8_t majority_vote(const std::vector<uint8_t>& votes) {
    if (votes.empty()) raise(errc::empty_input, "majority vote over no votes");
    std::size_t ones = 0;
    for (uint8_t v : votes) {
        if (v > 1) raise(errc::bad_label_value, "votes must be binarized first");
        ones += v;
    }
    return ones * 2 > votes.size() ? uint8_t{1} : uint8_t{0};
}

// Per-attribute majority over the annotators' binarized vectors.
inline std::vector<uint8_t> majority_vote_vectors(
    const std::vector<std::vector<uint8_t>>& annotators) {
    if (annotators.empty()) raise(errc::empty_input, "no annotator vectors");
    const std::size_t width = annotators.front().size();
    for (const auto& row : annotators) {
        if (row.size() != width) {
            raise(errc::length_mismatch, "annotator vectors differ in length");
        }
    }
    std::vector<uint8_t> merged(width);
    std::vector<uint8_t> column(annotators.size());
    for (std::size_t i = 0; i < width; ++i) {
        for (std::size_t j = 0; j < annotators.size(); ++j) {
            column[j] = annotators[j][i];
        }
        merged[i] = majority_vote(column);
    }
    return merged;
}

inline double percent_agreement(const std::vector<uint8_t>& a,
                                const std::vector<uint8_t>& b) {
    if (a.size() != b.size()) {
        raise(errc::length_mismatch, "agreement vectors differ in length");
    }
    if (a.empty()) raise(errc::empty_input, "agreement over empty vectors");
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(a.size());
}

// Fraction of positions where all annotators give the identical label.
inline double consensus_agreement(
    const std::vector<std::vector<uint8_t>>& annotators) {
    if (annotators.size() < 2) {
        raise(errc::empty_input, "consensus needs at least two annotators");
    }
    const std::size_t width = annotators.front().size();
    for (const auto& row : annotators) {
        if (row.size() != width) {
            raise(errc::length_mismatch, "annotator vectors differ in length");
        }
    }
    if (width == 0) raise(errc::empty_input, "consensus over empty vectors");
    std::size_t unanimous = 0;
    for (std::size_t i = 0; i < width; ++i) {
        bool all_same = true;
        for (std::size_t j = 1; j < annotators.size(); ++j) {
            if (annotators[j][i] != annotators[0][i]) {
                all_same = false;
                break;
            }
        }
        if (all_same) ++unanimous;
    }
    return static_cast<double>(unanimous) / static_cast<double>(width);
}

// (p_o - p_e) / (1 - p_e). Expanded over the contingency counts this is
// (n*agree - chance) / (n^2 - chance) with chance = ones_a*ones_b +
// zeros_a*zeros_b; one final division keeps rational results (like the
// 20/5/10/15 table's 0.4) correctly rounded. The all-same-label case has
// p_e = 1 and is reported as 0 with the degenerate flag set.
inline double cohen_kappa(const std::vector<uint8_t>& a,
                          const std::vector<uint8_t>& b,
                          bool* degenerate = nullptr) {
    if (a.size() != b.size()) {
        raise(errc::length_mismatch, "kappa vectors differ in length");
    }
    if (a.size() < 2) raise(errc::empty_input, "kappa needs at least two items");
    if (degenerate) *degenerate = false;
    int64_t matches = 0, a_ones = 0, b_ones = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 1 || b[i] > 1) {
            raise(errc::bad_label_value, "kappa inputs must be binarized");
        }
        if (a[i] == b[i]) ++matches;
        a_ones += a[i];
        b_ones += b[i];
    }
    const int64_t n = static_cast<int64_t>(a.size());
    const int64_t chance = a_ones * b_ones + (n - a_ones) * (n - b_ones);
    const int64_t denominator = n * n - chance;
    if (denominator == 0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return static_cast<double>(n * matches - chance) /
           static_cast<double>(denominator);
}

struct AgreementReport {
    double percent_agreement = 0.0; // pooled over all compared cells
    double cohen_kappa = 0.0;       // mean over annotator pairs
    bool kappa_degenerate = false;  // some pair had only one label value
    std::vector<double> per_attribute_agreement;
    std::size_t n_items = 0;  // compared (image, annotator-pair) vectors
    std::size_t n_images = 0;
    std::size_t n_pairs = 0;  // annotator pairs with shared images
    std::string kappa_aggregation = "pairwise_mean";
};

// Pairwise agreement over every annotator pair and every image both
// annotated. Overall percent agreement is pooled across cells, so it equals
// the mean of the per-attribute values; kappa is the mean of per-pair kappas.
inline AgreementReport agreement_report(
    const std::vector<AnnotationRecord>& records, std::size_t attribute_count) {
    if (records.empty()) raise(errc::empty_input, "no annotation records");

    std::vector<std::string> image_order;
    std::vector<std::string> annotator_order;
    // image -> annotator -> binarized labels
    std::map<std::string, std::map<std::string, std::vector<uint8_t>>> by_image;
    for (const auto& rec : records) {
        if (rec.labels.size() != attribute_count) {
            raise(errc::length_mismatch,
                  "record for '" + rec.image_id + "' has " +
                      std::to_string(rec.labels.size()) + " labels, expected " +
                      std::to_string(attribute_count));
        }
        auto& slot = by_image[rec.image_id];
        if (slot.empty()) image_order.push_back(rec.image_id);
        if (slot.count(rec.annotator_id)) {
            raise(errc::inconsistent_record,
                  "duplicate annotation by '" + rec.annotator_id + "' for '" +
                      rec.image_id + "'");
        }
        bool seen = false;
        for (const auto& known : annotator_order) {
            if (known == rec.annotator_id) {
                seen = true;
                break;
            }
        }
        if (!seen) annotator_order.push_back(rec.annotator_id);
        slot.emplace(rec.annotator_id, binarize(rec.labels));
    }

    AgreementReport report;
    report.n_images = image_order.size();
    report.per_attribute_agreement.assign(attribute_count, 0.0);
    std::vector<std::size_t> attr_matches(attribute_count, 0);
    std::size_t comparisons = 0;
    double kappa_sum = 0.0;
    std::size_t kappa_pairs = 0;

    for (std::size_t i = 0; i < annotator_order.size(); ++i) {
        for (std::size_t j = i + 1; j < annotator_order.size(); ++j) {
            std::vector<uint8_t> left, right;
            for (const auto& image : image_order) {
                const auto& slot = by_image[image];
                auto a = slot.find(annotator_order[i]);
                auto b = slot.find(annotator_order[j]);
                if (a == slot.end() || b == slot.end()) continue;
                for (std::size_t k = 0; k < attribute_count; ++k) {
                    if (a->second[k] == b->second[k]) ++attr_matches[k];
                }
                left.insert(left.end(), a->second.begin(), a->second.end());
                right.insert(right.end(), b->second.begin(), b->second.end());
                ++comparisons;
            }
            if (left.empty()) continue;
            ++report.n_pairs;
            bool degenerate = false;
            kappa_sum += cohen_kappa(left, right, &degenerate);
            if (degenerate) report.kappa_degenerate = true;
            ++kappa_pairs;
        }
    }

    if (comparisons == 0) {
        raise(errc::empty_input, "no annotator pair shares an image");
    }
    report.n_items = comparisons;
    std::size_t total_matches = 0;
    for (std::size_t k = 0; k < attribute_count; ++k) {
        total_matches += attr_matches[k];
        report.per_attribute_agreement[k] =
            static_cast<double>(attr_matches[k]) / static_cast<double>(comparisons);
    }
    report.percent_agreement =
        static_cast<double>(total_matches) /
        static_cast<double>(comparisons * attribute_count);
    report.cohen_kappa = kappa_sum / static_cast<double>(kappa_pairs);
    return report;
}

} // namespace cprt
