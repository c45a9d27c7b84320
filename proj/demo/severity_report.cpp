// Walkthrough of the library surface: classify an attribute through the
// decision questions, score attribute profiles, merge two annotators into
// ground truth, and evaluate a noisy mock predictor against it.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <cprt/cprt.hpp>

namespace {

const char* level_or_safe(const std::optional<cprt::SeverityLevel>& level) {
    return level ? cprt::level_name(*level) : "safe";
}

cprt::AnnotationRecord annotate(const cprt::TaxonomyRegistry& registry,
                                std::string image, std::string annotator,
                                const std::vector<std::string>& present) {
    cprt::AnnotationRecord record;
    record.image_id = std::move(image);
    record.annotator_id = std::move(annotator);
    record.labels.assign(registry.attribute_count(), cprt::Label::absent);
    for (const auto& id : present) {
        record.labels[*registry.index_of(id)] = cprt::Label::present;
    }
    return record;
}

} // namespace

int main() {
    const auto& registry = cprt::canonical_registry();

    std::printf("decision tree\n");
    // Answers to: identifies uniquely / identifies with linkage / contributes
    // to aggregation / none of the above.
    const cprt::DecisionAnswers tattoo{true, false, false, false};
    const cprt::DecisionAnswers neighborhood{false, false, true, false};
    std::printf("  distinctive tattoo        -> %s\n",
                cprt::level_name(cprt::classify_attribute(tattoo)));
    std::printf("  recognizable neighborhood -> %s\n",
                cprt::level_name(cprt::classify_attribute(neighborhood)));

    std::printf("\nseverity scores by level counts (L1,L2,L3,L4)\n");
    const std::vector<cprt::LevelCounts> profiles{
        {0, 0, 0, 2}, // background clutter only
        {0, 1, 2, 1}, // a medical detail plus context
        {1, 3, 0, 0}, // an identity document among personal data
    };
    for (const auto& counts : profiles) {
        const auto scored = cprt::severity_score(counts, registry);
        std::printf("  (%d,%d,%d,%d) -> score %.3f, level %s\n", counts[0], counts[1],
                    counts[2], counts[3], scored.value, level_or_safe(scored.level));
    }

    std::printf("\ndual-annotator ground truth\n");
    const std::vector<cprt::AnnotationRecord> annotations{
        annotate(registry, "street_24", "ann_a", {"gov_ids", "location"}),
        annotate(registry, "street_24", "ann_b", {"gov_ids"}),
        annotate(registry, "park_07", "ann_a", {"age", "activities"}),
        annotate(registry, "park_07", "ann_b", {"age", "activities"}),
        annotate(registry, "desk_13", "ann_a", {"financial_data", "metadata"}),
        annotate(registry, "desk_13", "ann_b", {"financial_data", "metadata"}),
    };
    const auto ground_truth =
        cprt::build_ground_truth(annotations, registry, cprt::GroundTruthMode::dual);
    for (const auto& record : ground_truth) {
        std::printf("  %-9s -> score %.3f, level %-4s (", record.image_id.c_str(),
                    record.gt_score, level_or_safe(record.gt_level));
        const char* sep = "";
        for (std::size_t i = 0; i < record.merged_attributes.size(); ++i) {
            if (!record.merged_attributes[i]) continue;
            std::printf("%s%s", sep, registry.attributes()[i].id.c_str());
            sep = ", ";
        }
        std::printf(")\n");
    }

    std::printf("\nmock predictor evaluation\n");
    std::vector<cprt::EvaluationRecord> records;
    cprt::DeterministicRng rng(7);
    for (const auto& record : ground_truth) {
        const double noise = 0.03 * (rng.next_unit() - 0.5);
        records.push_back({record.image_id, record.gt_score, record.gt_level,
                           std::clamp(record.gt_score + noise, 0.0, 1.0)});
    }
    const auto report = cprt::compute_metrics(records, registry.boundaries());
    std::printf("  mae            %.4f\n", report.mae);
    std::printf("  bias           %+.4f\n", report.bias);
    std::printf("  level accuracy %.2f\n", report.level_accuracy);
    if (report.inter_acc) {
        std::printf("  inter-level pairwise accuracy %.2f over %zu pairs\n",
                    *report.inter_acc, report.inter_pairs);
    }
    return 0;
}
