#pragma once

// Canonical CPRT attribute set: 22 attributes over four severity levels with
// cardinalities (3, 10, 5, 4). Ordering follows the annotation question list;
// code is the source of truth and data/cprt_canonical.json must stay in sync
// (checked by tests). Decision answers hold exactly one `true`, at the
// attribute's level.

#include <vector>

#include "cprt/taxonomy.hpp"

namespace cprt {

inline std::vector<AttributeSpec> canonical_attributes() {
    auto spec = [](const char* id, const char* name, int level,
                   const char* subcategory) {
        DecisionAnswers answers{false, false, false, false};
        answers[static_cast<std::size_t>(level - 1)] = true;
        return AttributeSpec{id, name, severity_level_from_int(level),
                             subcategory, answers};
    };
    const char* l1 = "Unique Identifiers";
    const char* l2 = "Linkage-Based Identifiers";
    const char* l3 = "Aggregation-Based Identifiers";
    const char* l4 = "Benign Contextual Information";
    return {
        spec("biometrics", "Biometric identifiers", 1, l1),
        spec("gov_ids", "Government-issued identifiers", 1, l1),
        spec("unique_body_markings", "Unique body markings", 1, l1),
        spec("contact_details", "Direct contact details", 2, l2),
        spec("full_legal_name", "Full legal name", 2, l2),
        spec("non_unique_id", "Non-unique identifiers", 2, l2),
        spec("medical_data", "Medical information", 2, l2),
        spec("financial_data", "Financial information", 2, l2),
        spec("beliefs", "Personal beliefs", 2, l2),
        spec("nudity", "Nudity or sexual content", 2, l2),
        spec("disability", "Disability indicators", 2, l2),
        spec("emotion_mental_health", "Emotional or mental-health state", 2, l2),
        spec("race_ethnicity", "Race or ethnicity", 2, l2),
        spec("age", "Age", 3, l3),
        spec("gender", "Gender", 3, l3),
        spec("location", "Location clues", 3, l3),
        spec("activities", "Identifiable activities", 3, l3),
        spec("lifestyle", "Lifestyle or habit clues", 3, l3),
        spec("property_assets", "Personal property or assets", 4, l4),
        spec("documents", "Non-sensitive documents", 4, l4),
        spec("metadata", "Visible metadata", 4, l4),
        spec("background_people", "Background individuals", 4, l4),
    };
}

inline WeightVector canonical_weights() { return {330, 30, 5, 1}; }

inline const TaxonomyRegistry& canonical_registry() {
    static const TaxonomyRegistry registry = TaxonomyRegistry::build(
        canonical_attributes(), canonical_weights(), canonical_boundaries());
    return registry;
}

} // namespace cprt
