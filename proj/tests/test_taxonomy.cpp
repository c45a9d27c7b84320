#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "cprt/canonical.hpp"
#include "cprt/rng.hpp"
#include "cprt/taxonomy.hpp"
#include "helpers.hpp"

using namespace cprt;
using testutil::raises;

TEST_CASE("classify_attribute picks the first yes") {
    REQUIRE(classify_attribute({true, false, false, false}) == SeverityLevel::L1);
    REQUIRE(classify_attribute({true, true, true, true}) == SeverityLevel::L1);
    REQUIRE(classify_attribute({false, true, false, false}) == SeverityLevel::L2);
    REQUIRE(classify_attribute({false, false, true, false}) == SeverityLevel::L3);
    REQUIRE(classify_attribute({false, false, false, true}) == SeverityLevel::L4);
    REQUIRE(raises(errc::all_negative, [] {
        classify_attribute({false, false, false, false});
    }));
}

TEST_CASE("boundary set validates its edges") {
    SECTION("canonical edges") {
        const BoundarySet& b = canonical_boundaries();
        REQUIRE(b.lower(SeverityLevel::L1) == 0.711);
        REQUIRE(b.lower(SeverityLevel::L2) == 0.514);
        REQUIRE(b.lower(SeverityLevel::L3) == 0.292);
        REQUIRE(b.lower(SeverityLevel::L4) == 0.0);
        REQUIRE(b.upper(SeverityLevel::L1) == 1.0);
        REQUIRE(b.upper(SeverityLevel::L2) == 0.711);
        REQUIRE(b.upper(SeverityLevel::L3) == 0.514);
        REQUIRE(b.upper(SeverityLevel::L4) == 0.292);
    }
    SECTION("level-4 edge must be zero") {
        REQUIRE(raises(errc::non_monotone_thresholds, [] {
            BoundarySet::from_lower_edges({0.7, 0.5, 0.3, 0.1});
        }));
    }
    SECTION("edges must strictly decrease") {
        REQUIRE(raises(errc::non_monotone_thresholds, [] {
            BoundarySet::from_lower_edges({0.5, 0.5, 0.3, 0.0});
        }));
        REQUIRE(raises(errc::non_monotone_thresholds, [] {
            BoundarySet::from_lower_edges({0.3, 0.5, 0.2, 0.0});
        }));
    }
    SECTION("level-1 edge must stay below one") {
        REQUIRE(raises(errc::non_monotone_thresholds, [] {
            BoundarySet::from_lower_edges({1.0, 0.5, 0.3, 0.0});
        }));
    }
}

TEST_CASE("weight constraint arithmetic") {
    const CardinalityVector cards{3, 10, 5, 4};

    SECTION("paper weights pass with slack exactly one at every level") {
        const WeightVector w{330, 30, 5, 1};
        REQUIRE_NOTHROW(validate_weights(cards, w));
        // w_i - sum over lower levels: 330-329, 30-29, 5-4
        REQUIRE(w[0] - (10 * w[1] + 5 * w[2] + 4 * w[3]) == 1);
        REQUIRE(w[1] - (5 * w[2] + 4 * w[3]) == 1);
        REQUIRE(w[2] - 4 * w[3] == 1);
    }
    SECTION("329 fails the strict inequality at level 1") {
        REQUIRE(raises(errc::invalid_weights, [&] {
            validate_weights(cards, {329, 30, 5, 1});
        }));
        try {
            validate_weights(cards, {329, 30, 5, 1});
        } catch (const Error& e) {
            REQUIRE(std::string(e.what()).find("level 1") != std::string::npos);
        }
    }
    SECTION("non-positive weights rejected") {
        REQUIRE(raises(errc::invalid_weights, [&] {
            validate_weights(cards, {330, 30, 5, 0});
        }));
    }
}

TEST_CASE("minimal_valid_weights chains from the bottom") {
    REQUIRE(minimal_valid_weights({3, 10, 5, 4}) == WeightVector{330, 30, 5, 1});
    REQUIRE(minimal_valid_weights({1, 1, 1, 1}) == WeightVector{8, 4, 2, 1});
    REQUIRE(minimal_valid_weights({0, 0, 0, 1}) == WeightVector{2, 2, 2, 1});

    SECTION("output always validates, randomized") {
        DeterministicRng rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            CardinalityVector cards{};
            for (auto& c : cards) c = static_cast<int>(rng.uniform_index(12));
            const WeightVector weights = minimal_valid_weights(cards);
            REQUIRE_NOTHROW(validate_weights(cards, weights));
        }
    }
}

TEST_CASE("canonical registry") {
    const TaxonomyRegistry& registry = canonical_registry();
    REQUIRE(registry.attribute_count() == 22);
    REQUIRE(registry.cardinalities() == CardinalityVector{3, 10, 5, 4});
    REQUIRE(registry.weights() == WeightVector{330, 30, 5, 1});
    REQUIRE(registry.boundaries() == canonical_boundaries());

    SECTION("every attribute's answers classify to its declared level") {
        for (const auto& attr : registry.attributes()) {
            REQUIRE(classify_attribute(attr.decision_answers) == attr.level);
        }
    }
    SECTION("ids unique and resolvable") {
        for (std::size_t i = 0; i < registry.attribute_count(); ++i) {
            const auto index = registry.index_of(registry.attributes()[i].id);
            REQUIRE(index.has_value());
            REQUIRE(*index == i);
        }
        REQUIRE_FALSE(registry.index_of("not_an_attribute").has_value());
    }
}

TEST_CASE("registry construction failures") {
    SECTION("duplicate ids") {
        auto specs = canonical_attributes();
        specs[1].id = specs[0].id;
        REQUIRE(raises(errc::duplicate_id, [&] {
            TaxonomyRegistry::build(specs, canonical_weights(),
                                    canonical_boundaries());
        }));
    }
    SECTION("declared level contradicting the answers") {
        auto specs = canonical_attributes();
        specs[0].level = SeverityLevel::L2; // answers still say L1
        REQUIRE(raises(errc::level_answers_mismatch, [&] {
            TaxonomyRegistry::build(specs, canonical_weights(),
                                    canonical_boundaries());
        }));
    }
    SECTION("an 11th level-2 attribute invalidates the fixed weights") {
        auto specs = canonical_attributes();
        AttributeSpec extra;
        extra.id = "pregnancy";
        extra.name = "Pregnancy inference";
        extra.level = SeverityLevel::L2;
        extra.subcategory = "Linkage-Based Identifiers";
        extra.decision_answers = {false, true, false, false};
        specs.push_back(extra);
        REQUIRE(raises(errc::invalid_weights, [&] {
            TaxonomyRegistry::build(specs, canonical_weights(),
                                    canonical_boundaries());
        }));
        // recomputed minimal weights make the extended set valid again
        const WeightVector updated = minimal_valid_weights({3, 11, 5, 4});
        REQUIRE_NOTHROW(TaxonomyRegistry::build(specs, updated,
                                                canonical_boundaries()));
    }
    SECTION("empty spec list") {
        REQUIRE(raises(errc::empty_input, [] {
            TaxonomyRegistry::build({}, WeightVector{2, 2, 2, 1},
                                    canonical_boundaries());
        }));
    }
}
