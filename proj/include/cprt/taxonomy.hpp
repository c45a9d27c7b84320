#pragma once

// Attribute registry for the four-level compositional privacy taxonomy.
// Levels are never free-set: each attribute stores its four decision-tree
// answers and the level is derived from them, so taxonomy extensions stay
// auditable. Registry construction re-validates the lexicographic weight
// constraint; a violation blocks construction.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cprt/error.hpp"

namespace cprt {

enum class SeverityLevel : int {
    L1 = 1, // unique identifiers
    L2 = 2, // linkage-based identifiers
    L3 = 3, // aggregation-based identifiers
    L4 = 4, // benign contextual
};

inline int level_index(SeverityLevel level) { return static_cast<int>(level); }

inline SeverityLevel severity_level_from_int(int value) {
    if (value < 1 || value > 4) {
        raise(errc::count_out_of_range,
              "severity level must be in 1..4, got " + std::to_string(value));
    }
    return static_cast<SeverityLevel>(value);
}

inline const char* level_name(SeverityLevel level) {
    switch (level) {
        case SeverityLevel::L1: return "L1";
        case SeverityLevel::L2: return "L2";
        case SeverityLevel::L3: return "L3";
        case SeverityLevel::L4: return "L4";
    }
    return "?";
}

using DecisionAnswers = std::array<bool, 4>;
using WeightVector = std::array<int64_t, 4>;
using CardinalityVector = std::array<int, 4>;

// Level = index of the first "yes" in the ordered question list.
inline SeverityLevel classify_attribute(const DecisionAnswers& answers) {
    for (int i = 0; i < 4; ++i) {
        if (answers[static_cast<std::size_t>(i)]) {
            return static_cast<SeverityLevel>(i + 1);
        }
    }
    raise(errc::all_negative,
          "all four decision questions answered no: attribute is outside the "
          "taxonomy scope");
}

struct AttributeSpec {
    std::string id;
    std::string name;
    SeverityLevel level = SeverityLevel::L4;
    std::string subcategory;
    DecisionAnswers decision_answers{};
};

// Four ordered, non-overlapping intervals partitioning [0,1]. Stored as the
// lower edges; upper(L) == lower(L-1), upper(L1) == 1.
class BoundarySet {
public:
    static BoundarySet from_lower_edges(const std::array<double, 4>& lower) {
        if (lower[3] != 0.0) {
            raise(errc::non_monotone_thresholds,
                  "level-4 lower boundary must be 0, got " +
                      std::to_string(lower[3]));
        }
        if (!(lower[0] < 1.0)) {
            raise(errc::non_monotone_thresholds,
                  "level-1 lower boundary must be below 1, got " +
                      std::to_string(lower[0]));
        }
        for (int i = 0; i < 3; ++i) {
            if (!(lower[static_cast<std::size_t>(i)] >
                  lower[static_cast<std::size_t>(i + 1)])) {
                raise(errc::non_monotone_thresholds,
                      "boundary lower edges must strictly decrease with level "
                      "index; violated between L" + std::to_string(i + 1) +
                          " and L" + std::to_string(i + 2));
            }
        }
        BoundarySet set;
        set.lower_ = lower;
        return set;
    }

    double lower(SeverityLevel level) const {
        return lower_[static_cast<std::size_t>(level_index(level) - 1)];
    }

    double upper(SeverityLevel level) const {
        const int idx = level_index(level);
        return idx == 1 ? 1.0 : lower_[static_cast<std::size_t>(idx - 2)];
    }

    const std::array<double, 4>& lower_edges() const { return lower_; }

    bool operator==(const BoundarySet&) const = default;

private:
    std::array<double, 4> lower_{0.0, 0.0, 0.0, 0.0};
};

// Paper-default partition of the score space.
inline const BoundarySet& canonical_boundaries() {
    static const BoundarySet set =
        BoundarySet::from_lower_edges({0.711, 0.514, 0.292, 0.0});
    return set;
}

// Checks w_i > sum_{j>i} |A_j| * w_j for i in {1,2,3}; reports the first
// violating level. Weights must be positive.
inline void validate_weights(const CardinalityVector& cardinalities,
                             const WeightVector& weights) {
    for (int i = 0; i < 4; ++i) {
        if (weights[static_cast<std::size_t>(i)] <= 0) {
            raise(errc::invalid_weights,
                  "weight w" + std::to_string(i + 1) + " must be positive");
        }
        if (cardinalities[static_cast<std::size_t>(i)] < 0) {
            raise(errc::invalid_weights, "cardinalities must be non-negative");
        }
    }
    for (int i = 0; i < 3; ++i) {
        int64_t tail = 0;
        for (int j = i + 1; j < 4; ++j) {
            tail += static_cast<int64_t>(cardinalities[static_cast<std::size_t>(j)]) *
                    weights[static_cast<std::size_t>(j)];
        }
        if (!(weights[static_cast<std::size_t>(i)] > tail)) {
            std::ostringstream msg;
            msg << "lexicographic weight constraint violated at level " << (i + 1)
                << ": w" << (i + 1) << " = " << weights[static_cast<std::size_t>(i)]
                << " must exceed " << tail;
            raise(errc::invalid_weights, msg.str());
        }
    }
}

// Smallest integer weights satisfying the constraint: w4 = 1 and
// w_i = sum_{j>i} |A_j| * w_j + 1 walking upward.
inline WeightVector minimal_valid_weights(const CardinalityVector& cardinalities) {
    for (int c : cardinalities) {
        if (c < 0) {
            raise(errc::invalid_weights, "cardinalities must be non-negative");
        }
    }
    WeightVector weights{};
    weights[3] = 1;
    for (int i = 2; i >= 0; --i) {
        int64_t tail = 0;
        for (int j = i + 1; j < 4; ++j) {
            tail += static_cast<int64_t>(cardinalities[static_cast<std::size_t>(j)]) *
                    weights[static_cast<std::size_t>(j)];
        }
        weights[static_cast<std::size_t>(i)] = tail + 1;
    }
    return weights;
}

// Immutable after construction; safe to share across threads.
class TaxonomyRegistry {
public:
    static TaxonomyRegistry build(std::vector<AttributeSpec> specs,
                                  const WeightVector& weights,
                                  const BoundarySet& boundaries) {
        if (specs.empty()) {
            raise(errc::empty_input, "taxonomy needs at least one attribute");
        }
        TaxonomyRegistry registry;
        registry.cardinalities_ = {0, 0, 0, 0};
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const AttributeSpec& spec = specs[i];
            const SeverityLevel derived = classify_attribute(spec.decision_answers);
            if (derived != spec.level) {
                raise(errc::level_answers_mismatch,
                      "attribute '" + spec.id + "' declares level " +
                          level_name(spec.level) +
                          " but its decision answers classify as " +
                          level_name(derived));
            }
            auto [it, inserted] = registry.index_by_id_.emplace(spec.id, i);
            (void)it;
            if (!inserted) {
                raise(errc::duplicate_id, "duplicate attribute id '" + spec.id + "'");
            }
            ++registry.cardinalities_[static_cast<std::size_t>(
                level_index(spec.level) - 1)];
        }
        validate_weights(registry.cardinalities_, weights);
        registry.attributes_ = std::move(specs);
        registry.weights_ = weights;
        registry.boundaries_ = boundaries;
        return registry;
    }

    const std::vector<AttributeSpec>& attributes() const { return attributes_; }
    const CardinalityVector& cardinalities() const { return cardinalities_; }
    const WeightVector& weights() const { return weights_; }
    const BoundarySet& boundaries() const { return boundaries_; }
    std::size_t attribute_count() const { return attributes_.size(); }

    std::optional<std::size_t> index_of(const std::string& id) const {
        auto it = index_by_id_.find(id);
        if (it == index_by_id_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<AttributeSpec> attributes_;
    CardinalityVector cardinalities_{0, 0, 0, 0};
    WeightVector weights_{1, 1, 1, 1};
    BoundarySet boundaries_;
    std::unordered_map<std::string, std::size_t> index_by_id_;
};

} // namespace cprt
