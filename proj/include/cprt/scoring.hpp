#pragma once

// Continuous severity scoring. Per-image attribute counts (c1..c4) map to a
// score in [0,1] in three steps:
//   1. lexicographic weighted sum over levels >= the determined level,
//   2. ratio stretching that removes the gap below the single-attribute
//      minimum, computed as (S_lex - w_L) / (S_max - w_L),
//   3. square-root interpolation into the determined level's boundary
//      interval.
// The maximal combination at levels 2..4 would land exactly on the next
// level's lower boundary, so the stretched ratio is clamped to 1 - 1e-9 for
// those levels; level 1 legitimately attains 1.0.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "cprt/error.hpp"
#include "cprt/taxonomy.hpp"

namespace cprt {

// Attribute counts per severity level for one image.
using LevelCounts = std::array<int, 4>;

struct SeverityScore {
    double value = 0.0;
    std::optional<SeverityLevel> level; // nullopt when no attribute present
};

// Keeps the clamped maximal combinations strictly inside their interval.
inline constexpr double kRatioClamp = 1.0 - 1e-9;

inline std::optional<SeverityLevel> determined_level(const LevelCounts& counts) {
    for (int i = 0; i < 4; ++i) {
        if (counts[static_cast<std::size_t>(i)] > 0) {
            return static_cast<SeverityLevel>(i + 1);
        }
    }
    return std::nullopt;
}

inline void validate_counts(const LevelCounts& counts,
                            const CardinalityVector& cardinalities) {
    for (int i = 0; i < 4; ++i) {
        const int c = counts[static_cast<std::size_t>(i)];
        if (c < 0 || c > cardinalities[static_cast<std::size_t>(i)]) {
            std::ostringstream msg;
            msg << "count c" << (i + 1) << " = " << c << " outside [0, "
                << cardinalities[static_cast<std::size_t>(i)] << "]";
            raise(errc::count_out_of_range, msg.str());
        }
    }
}

// Weighted sum over levels at and below the determined level; 0 when empty.
inline int64_t lex_score(const LevelCounts& counts, const WeightVector& weights) {
    const auto level = determined_level(counts);
    if (!level) return 0;
    int64_t sum = 0;
    for (int k = level_index(*level); k <= 4; ++k) {
        sum += static_cast<int64_t>(counts[static_cast<std::size_t>(k - 1)]) *
               weights[static_cast<std::size_t>(k - 1)];
    }
    return sum;
}

inline SeverityScore severity_score(const LevelCounts& counts,
                                    const TaxonomyRegistry& registry) {
    validate_counts(counts, registry.cardinalities());
    const auto level = determined_level(counts);
    if (!level) return SeverityScore{0.0, std::nullopt};

    const WeightVector& weights = registry.weights();
    const CardinalityVector& cards = registry.cardinalities();
    const int l = level_index(*level);

    const int64_t s_lex = lex_score(counts, weights);
    int64_t s_max = 0;
    for (int k = l; k <= 4; ++k) {
        s_max += static_cast<int64_t>(cards[static_cast<std::size_t>(k - 1)]) *
                 weights[static_cast<std::size_t>(k - 1)];
    }
    const int64_t w_l = weights[static_cast<std::size_t>(l - 1)];

    // (r - r_min) / (1 - r_min) with r = S_lex / S_max and r_min = w_L / S_max;
    // both S_max terms cancel, leaving an exact integer ratio.
    double r_norm = static_cast<double>(s_lex - w_l) /
                    static_cast<double>(s_max - w_l);
    if (l != 1 && r_norm > kRatioClamp) r_norm = kRatioClamp;

    const BoundarySet& bounds = registry.boundaries();
    const double lo = bounds.lower(*level);
    const double hi = bounds.upper(*level);
    return SeverityScore{lo + (hi - lo) * std::sqrt(r_norm), level};
}

// L1 if score >= lower(L1), else L2, L3; everything below lower(L3) is L4.
inline SeverityLevel bucketize(double score, const BoundarySet& boundaries) {
    if (!(score >= 0.0 && score <= 1.0)) {
        raise(errc::score_out_of_range,
              "score " + std::to_string(score) + " outside [0, 1]");
    }
    for (int i = 1; i <= 3; ++i) {
        if (score >= boundaries.lower(static_cast<SeverityLevel>(i))) {
            return static_cast<SeverityLevel>(i);
        }
    }
    return SeverityLevel::L4;
}

// Per-level counts from a merged binary attribute vector, then severity_score.
inline LevelCounts counts_from_vector(const std::vector<uint8_t>& bits,
                                      const TaxonomyRegistry& registry) {
    if (bits.size() != registry.attribute_count()) {
        raise(errc::length_mismatch,
              "attribute vector has " + std::to_string(bits.size()) +
                  " entries, registry has " +
                  std::to_string(registry.attribute_count()));
    }
    LevelCounts counts{0, 0, 0, 0};
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1) {
            raise(errc::bad_label_value,
                  "attribute vector entries must be 0 or 1");
        }
        if (bits[i] == 1) {
            ++counts[static_cast<std::size_t>(
                level_index(registry.attributes()[i].level) - 1)];
        }
    }
    return counts;
}

inline SeverityScore score_attribute_vector(const std::vector<uint8_t>& bits,
                                            const TaxonomyRegistry& registry) {
    return severity_score(counts_from_vector(bits, registry), registry);
}

// Visits every count combination 0 <= c_i <= |A_i| (the empty one included).
inline void for_each_combination(const CardinalityVector& cardinalities,
                                 const std::function<void(const LevelCounts&)>& fn) {
    LevelCounts counts{};
    for (counts[0] = 0; counts[0] <= cardinalities[0]; ++counts[0]) {
        for (counts[1] = 0; counts[1] <= cardinalities[1]; ++counts[1]) {
            for (counts[2] = 0; counts[2] <= cardinalities[2]; ++counts[2]) {
                for (counts[3] = 0; counts[3] <= cardinalities[3]; ++counts[3]) {
                    fn(counts);
                }
            }
        }
    }
}

inline std::string format_counts(const LevelCounts& counts) {
    std::ostringstream out;
    out << "(" << counts[0] << "," << counts[1] << "," << counts[2] << ","
        << counts[3] << ")";
    return out.str();
}

struct EnumerationCheck {
    std::size_t combination_count = 0;
    bool ok = true;
    std::string first_failure;
};

/// Exhaustive property check over the whole combination space: interval
// containment, strict cross-level dominance, within-level monotonicity on
// each count increment, and bucketize round-trip.
inline EnumerationCheck check_scoring_properties(const TaxonomyRegistry& registry) {
    EnumerationCheck result;
    const BoundarySet& bounds = registry.boundaries();
    std::array<double, 4> level_min{2.0, 2.0, 2.0, 2.0};
    std::array<double, 4> level_max{-1.0, -1.0, -1.0, -1.0};
    std::array<LevelCounts, 4> argmin{};
    std::array<LevelCounts, 4> argmax{};

    auto fail = [&result](const std::string& what) {
        if (result.ok) {
            result.ok = false;
            result.first_failure = what;
        }
    };

    for_each_combination(registry.cardinalities(), [&](const LevelCounts& counts) {
        ++result.combination_count;
        if (!result.ok) return;
        const SeverityScore score = severity_score(counts, registry);
        const auto level = determined_level(counts);
        if (!level) {
            if (score.value != 0.0 || score.level.has_value()) {
                fail("empty combination must score 0 with no level");
            }
            return;
        }

        // containment
        const double lo = bounds.lower(*level);
        const double hi = bounds.upper(*level);
        const bool inside = *level == SeverityLevel::L1
                                ? (score.value >= lo && score.value <= 1.0)
                                : (score.value >= lo && score.value < hi);
        if (!inside) {
            fail("containment violated at " + format_counts(counts) + ": score " +
                 std::to_string(score.value) + " outside " + level_name(*level) +
                 " interval");
            return;
        }

        // bucketize round-trip
        if (bucketize(score.value, bounds) != *level) {
            fail("bucketize round-trip violated at " + format_counts(counts));
            return;
        }

        // monotonicity: one increment in any level at or below the determined one
        for (int k = level_index(*level); k <= 4; ++k) {
            if (counts[static_cast<std::size_t>(k - 1)] >=
                registry.cardinalities()[static_cast<std::size_t>(k - 1)]) {
                continue;
            }
            LevelCounts bumped = counts;
            ++bumped[static_cast<std::size_t>(k - 1)];
            if (!(severity_score(bumped, registry).value > score.value)) {
                fail("monotonicity violated: " + format_counts(bumped) +
                     " does not score above " + format_counts(counts));
                return;
            }
        }

        const std::size_t li = static_cast<std::size_t>(level_index(*level) - 1);
        if (score.value < level_min[li]) {
            level_min[li] = score.value;
            argmin[li] = counts;
        }
        if (score.value > level_max[li]) {
            level_max[li] = score.value;
            argmax[li] = counts;
        }
    });

    // strict dominance: min of each level must exceed max of the next
    if (result.ok) {
        for (int i = 0; i < 3; ++i) {
            const std::size_t a = static_cast<std::size_t>(i);
            if (level_max[a + 1] < 0.0) continue; // level not populated
            if (!(level_min[a] > level_max[a + 1])) {
                fail("dominance violated: " + format_counts(argmin[a]) + " at L" +
                     std::to_string(i + 1) + " does not outrank " +
                     format_counts(argmax[a + 1]) + " at L" + std::to_string(i + 2));
                break;
            }
        }
    }
    return result;
}

} // namespace cprt
