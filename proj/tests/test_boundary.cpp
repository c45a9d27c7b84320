#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cprt/boundary_derivation.hpp"
#include "cprt/canonical.hpp"
#include "cprt/rng.hpp"
#include "cprt/scoring.hpp"
#include "helpers.hpp"

using namespace cprt;
using testutil::raises;

namespace {

EmbeddedSample at(double x, double y, SeverityLevel level) {
    return EmbeddedSample{{x, y}, level};
}

// Four tight clusters far apart on the x axis, level l centered at 20*l.
std::vector<EmbeddedSample> separated_clusters(std::size_t per_level) {
    std::vector<EmbeddedSample> refs;
    for (int l = 1; l <= 4; ++l) {
        for (std::size_t i = 0; i < per_level; ++i) {
            refs.push_back(at(20.0 * l + 0.001 * static_cast<double>(i),
                              0.001 * static_cast<double>(i % 5),
                              static_cast<SeverityLevel>(l)));
        }
    }
    return refs;
}

} // namespace

TEST_CASE("idw_score") {
    SECTION("one-point field returns that level") {
        const std::vector<EmbeddedSample> refs{at(0.3, 0.4, SeverityLevel::L2)};
        REQUIRE(idw_score({0.3, 0.4}, refs) == Catch::Approx(2.0).margin(1e-6));
    }
    SECTION("equidistant opposing levels average out") {
        const std::vector<EmbeddedSample> refs{at(-1.0, 0.0, SeverityLevel::L1),
                                               at(1.0, 0.0, SeverityLevel::L3)};
        REQUIRE(idw_score({0.0, 0.0}, refs) == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("hand-evaluated weighted mean") {
        // distances squared 1 and 3 from levels 1 and 3
        const std::vector<EmbeddedSample> refs{
            at(1.0, 0.0, SeverityLevel::L1),
            at(std::sqrt(3.0), 0.0, SeverityLevel::L3)};
        REQUIRE(idw_score({0.0, 0.0}, refs, 1e-12) ==
                Catch::Approx(1.5).margin(1e-9));
    }
    SECTION("no references left") {
        REQUIRE(raises(errc::empty_references, [] {
            idw_score({0.0, 0.0}, {});
        }));
        const std::vector<EmbeddedSample> refs{at(0.0, 0.0, SeverityLevel::L1)};
        REQUIRE(raises(errc::empty_references, [&] {
            idw_score({0.0, 0.0}, refs, kIdwEps, std::size_t{0});
        }));
    }
    SECTION("dimension mismatch") {
        const std::vector<EmbeddedSample> refs{at(0.0, 0.0, SeverityLevel::L1)};
        REQUIRE(raises(errc::length_mismatch, [&] {
            idw_score({0.0, 0.0, 0.0}, refs);
        }));
    }
    SECTION("permutation invariance and level bounds") {
        DeterministicRng rng(41);
        std::vector<EmbeddedSample> refs;
        for (int i = 0; i < 12; ++i) {
            refs.push_back(at(rng.next_normal(), rng.next_normal(),
                              static_cast<SeverityLevel>(1 + rng.uniform_index(4))));
        }
        const std::vector<double> query{0.25, -0.5};
        const double base = idw_score(query, refs);
        auto shuffled = refs;
        std::reverse(shuffled.begin(), shuffled.end());
        REQUIRE(idw_score(query, shuffled) == Catch::Approx(base).margin(1e-12));
        int lo = 4, hi = 1;
        for (const auto& r : refs) {
            lo = std::min(lo, level_index(r.level));
            hi = std::max(hi, level_index(r.level));
        }
        REQUIRE(base >= static_cast<double>(lo));
        REQUIRE(base <= static_cast<double>(hi));
    }
}

TEST_CASE("percentile_linear") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    REQUIRE(percentile_linear(v, 0.0) == 1.0);
    REQUIRE(percentile_linear(v, 100.0) == 4.0);
    REQUIRE(percentile_linear(v, 50.0) == Catch::Approx(2.5).margin(1e-12));
    REQUIRE(percentile_linear(v, 25.0) == Catch::Approx(1.75).margin(1e-12));
    REQUIRE(percentile_linear({7.5}, 5.0) == 7.5);
    // rank 5/100 * 20 = 1 exactly: second order statistic
    std::vector<double> w;
    for (int i = 20; i >= 0; --i) w.push_back(static_cast<double>(i));
    REQUIRE(percentile_linear(w, 5.0) == 1.0);
    REQUIRE(raises(errc::empty_input, [] { percentile_linear({}, 5.0); }));
}

TEST_CASE("extract_boundaries") {
    SECTION("all four levels are required") {
        std::vector<EmbeddedSample> refs = separated_clusters(3);
        std::erase_if(refs, [](const EmbeddedSample& r) {
            return r.level == SeverityLevel::L3;
        });
        REQUIRE(raises(errc::missing_level, [&] { extract_boundaries(refs); }));
    }
    SECTION("well-separated clusters give near-analytic thresholds") {
        const auto refs = separated_clusters(25);
        const BoundaryDerivation derivation = extract_boundaries(refs);
        REQUIRE(derivation.samples_per_level ==
                std::array<std::size_t, 4>{25, 25, 25, 25});
        REQUIRE(derivation.percentile == 5.0);

        const auto edges = derivation.boundaries.lower_edges();
        // cross-cluster contamination keeps t1 strictly below 1
        REQUIRE(edges[0] < 1.0);
        REQUIRE(edges[0] > 0.95);
        REQUIRE(edges[1] == Catch::Approx(2.0 / 3.0).margin(0.05));
        REQUIRE(edges[2] == Catch::Approx(1.0 / 3.0).margin(0.05));
        REQUIRE(edges[3] == 0.0);
        REQUIRE(edges[0] > edges[1]);
        REQUIRE(edges[1] > edges[2]);
        REQUIRE(edges[2] > 0.0);

        REQUIRE(derivation.raw_thresholds[0] == edges[0]);
        // raw level-4 threshold is measured even though the floor is forced
        REQUIRE(derivation.raw_thresholds[3] >= 0.0);
    }
    SECTION("identical result for any thread count") {
        const auto refs = separated_clusters(20);
        const auto one = extract_boundaries(refs, 5.0, kIdwEps, 1);
        const auto four = extract_boundaries(refs, 5.0, kIdwEps, 4);
        REQUIRE(one.boundaries == four.boundaries);
        REQUIRE(one.raw_thresholds == four.raw_thresholds);
    }
    SECTION("co-located level-1 and level-2 clusters invert the thresholds") {
        std::vector<EmbeddedSample> refs;
        for (int i = 0; i < 4; ++i) {
            refs.push_back(at(0.0, 0.0, SeverityLevel::L1));
            refs.push_back(at(0.0, 0.0, SeverityLevel::L2));
            refs.push_back(at(5.0, 0.0, SeverityLevel::L3));
            refs.push_back(at(10.0, 0.0, SeverityLevel::L4));
        }
        REQUIRE(raises(errc::non_monotone_thresholds, [&] {
            extract_boundaries(refs);
        }));
    }
    SECTION("derived boundaries satisfy the full scoring property suite") {
        const auto derivation = extract_boundaries(separated_clusters(25));
        const TaxonomyRegistry registry = TaxonomyRegistry::build(
            canonical_attributes(), canonical_weights(), derivation.boundaries);
        const EnumerationCheck check = check_scoring_properties(registry);
        REQUIRE(check.combination_count == 1320);
        REQUIRE(check.ok);
        REQUIRE(check.first_failure.empty());
    }
}

TEST_CASE("pca_2d") {
    SECTION("recovers a dominant axis") {
        // points spread along (1,1,0)/sqrt(2) with small noise on (0,0,1)
        std::vector<EmbeddedSample> refs;
        DeterministicRng rng(9);
        for (int i = 0; i < 50; ++i) {
            const double t = static_cast<double>(i) - 24.5;
            const double noise = 0.01 * rng.next_normal();
            refs.push_back(EmbeddedSample{
                {t / std::sqrt(2.0), t / std::sqrt(2.0), noise},
                SeverityLevel::L1});
        }
        const Projection2D projection = pca_2d(refs);
        REQUIRE(projection.points.size() == refs.size());
        REQUIRE(projection.explained_variance[0] >
                1000.0 * projection.explained_variance[1]);
        // first component carries the line parameter up to centering
        const double spread = projection.points.back()[0] -
                              projection.points.front()[0];
        REQUIRE(std::abs(spread) == Catch::Approx(49.0).margin(1e-3));
    }
    SECTION("deterministic across calls") {
        const auto refs = separated_clusters(10);
        const Projection2D a = pca_2d(refs);
        const Projection2D b = pca_2d(refs);
        REQUIRE(a.points == b.points);
        REQUIRE(a.explained_variance == b.explained_variance);
    }
    SECTION("empty input rejected") {
        REQUIRE(raises(errc::empty_input, [] { pca_2d({}); }));
    }
}
