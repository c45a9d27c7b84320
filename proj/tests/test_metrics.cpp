#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cprt/canonical.hpp"
#include "cprt/metrics.hpp"
#include "cprt/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cprt;
using testutil::raises;

namespace {

EvaluationRecord rec(std::string id, double gt, std::optional<SeverityLevel> level,
                     double pred) {
    return EvaluationRecord{std::move(id), gt, level, pred};
}

std::vector<EvaluationRecord> three_level_records() {
    return {
        rec("a", 0.80, SeverityLevel::L1, 0.80),
        rec("b", 0.60, SeverityLevel::L2, 0.60),
        rec("c", 0.55, SeverityLevel::L2, 0.55),
    };
}

} // namespace

TEST_CASE("pearson") {
    const std::vector<double> x{0.1, 0.4, 0.7, 0.9};
    SECTION("identity and affine reversal") {
        REQUIRE(pearson(x, x) == Catch::Approx(1.0).margin(1e-12));
        std::vector<double> neg;
        for (double v : x) neg.push_back(1.0 - v);
        REQUIRE(pearson(x, neg) == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("hand value") {
        REQUIRE(pearson({0, 1, 2}, {0, 1, 3}) ==
                Catch::Approx(0.98198).margin(1e-4));
    }
    SECTION("invariant under positive affine transforms") {
        const std::vector<double> y{0.3, 0.1, 0.8, 0.5};
        std::vector<double> scaled;
        for (double v : y) scaled.push_back(3.5 * v + 0.2);
        REQUIRE(pearson(x, y) == Catch::Approx(pearson(x, scaled)).margin(1e-12));
    }
    SECTION("constant input rejected") {
        REQUIRE(raises(errc::constant_input, [&] {
            pearson(x, {0.5, 0.5, 0.5, 0.5});
        }));
        REQUIRE(raises(errc::constant_input, [&] {
            pearson({0.5, 0.5, 0.5, 0.5}, x);
        }));
    }
    SECTION("too short") {
        REQUIRE(raises(errc::empty_input, [] { pearson({1.0}, {1.0}); }));
        REQUIRE(raises(errc::length_mismatch, [] {
            pearson({1.0, 2.0}, {1.0});
        }));
    }
}

TEST_CASE("average_ranks") {
    REQUIRE(average_ranks({10.0, 30.0, 20.0}) == std::vector<double>{1.0, 3.0, 2.0});
    // ties share the mean of their positions
    REQUIRE(average_ranks({1.0, 1.0, 3.0, 4.0}) ==
            std::vector<double>{1.5, 1.5, 3.0, 4.0});
}

TEST_CASE("spearman") {
    SECTION("monotone equals one, reversed equals minus one") {
        const std::vector<double> x{1, 2, 3, 4, 5};
        const std::vector<double> y{0.1, 0.2, 0.5, 0.7, 0.99};
        REQUIRE(spearman(x, y) == Catch::Approx(1.0).margin(1e-12));
        std::vector<double> reversed(y.rbegin(), y.rend());
        REQUIRE(spearman(x, reversed) == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("hand value with a tie") {
        REQUIRE(spearman({1, 2, 3, 4}, {1, 1, 3, 4}) ==
                Catch::Approx(0.9487).margin(1e-3));
    }
    SECTION("invariant under strictly monotone transforms") {
        const std::vector<double> x{0.1, 0.9, 0.4, 0.6, 0.2};
        const std::vector<double> y{0.5, 0.3, 0.9, 0.2, 0.8};
        std::vector<double> warped;
        for (double v : y) warped.push_back(std::exp(3.0 * v));
        REQUIRE(spearman(x, y) == Catch::Approx(spearman(x, warped)).margin(1e-12));
    }
    SECTION("constant ranks rejected") {
        REQUIRE(raises(errc::constant_input, [] {
            spearman({1, 2, 3}, {5, 5, 5});
        }));
    }
}

TEST_CASE("mae_and_bias") {
    SECTION("exact cases") {
        const std::vector<double> gt{0.1, 0.5, 0.9};
        auto [mae0, bias0] = mae_and_bias(gt, gt);
        REQUIRE(mae0 == 0.0);
        REQUIRE(bias0 == 0.0);

        std::vector<double> shifted;
        for (double v : gt) shifted.push_back(v + 0.1);
        auto [mae1, bias1] = mae_and_bias(shifted, gt);
        REQUIRE(mae1 == Catch::Approx(0.1).margin(1e-12));
        REQUIRE(bias1 == Catch::Approx(0.1).margin(1e-12));

        auto [mae2, bias2] = mae_and_bias({0.4, 0.1}, {0.2, 0.3});
        REQUIRE(mae2 == Catch::Approx(0.2).margin(1e-12));
        REQUIRE(bias2 == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("validation") {
        REQUIRE(raises(errc::empty_input, [] { mae_and_bias({}, {}); }));
        REQUIRE(raises(errc::length_mismatch, [] {
            mae_and_bias({0.1}, {0.1, 0.2});
        }));
    }
}

TEST_CASE("randomized oracle suite at 1e-9") {
    DeterministicRng rng(123);
    int correlation_cases = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(8); // <= 10 elements
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // quantized so ties occur regularly
            x[i] = static_cast<double>(rng.uniform_index(8)) / 8.0;
            y[i] = static_cast<double>(rng.uniform_index(8)) / 8.0;
        }
        auto [mae, bias] = mae_and_bias(x, y);
        REQUIRE(mae == Catch::Approx(oracle::mae(x, y)).margin(1e-9));
        REQUIRE(bias == Catch::Approx(oracle::bias(x, y)).margin(1e-9));

        const bool x_const = std::all_of(x.begin(), x.end(),
                                         [&](double v) { return v == x[0]; });
        const bool y_const = std::all_of(y.begin(), y.end(),
                                         [&](double v) { return v == y[0]; });
        if (x_const || y_const) continue;
        REQUIRE(pearson(x, y) == Catch::Approx(oracle::pearson(x, y)).margin(1e-9));
        REQUIRE(spearman(x, y) == Catch::Approx(oracle::spearman(x, y)).margin(1e-9));
        ++correlation_cases;
    }
    REQUIRE(correlation_cases >= 100);
}

TEST_CASE("curate_pairs") {
    SECTION("enumerates eligibility for levels (1, 2, 2)") {
        const auto records = three_level_records();
        const auto inter = curate_pairs(records, PairMode::inter);
        REQUIRE(inter == std::vector<IndexPair>{{0, 1}, {0, 2}});
        const auto intra = curate_pairs(records, PairMode::intra);
        REQUIRE(intra == std::vector<IndexPair>{{1, 2}});
    }
    SECTION("all same level yields no inter pairs") {
        std::vector<EvaluationRecord> records{
            rec("a", 0.8, SeverityLevel::L1, 0.1),
            rec("b", 0.9, SeverityLevel::L1, 0.2),
        };
        REQUIRE(raises(errc::no_eligible_pairs, [&] {
            curate_pairs(records, PairMode::inter);
        }));
        REQUIRE(curate_pairs(records, PairMode::intra).size() == 1);
    }
    SECTION("gt-tied within-level pairs are excluded at curation") {
        std::vector<EvaluationRecord> records{
            rec("a", 0.8, SeverityLevel::L1, 0.1),
            rec("b", 0.8, SeverityLevel::L1, 0.2),
        };
        REQUIRE(raises(errc::no_eligible_pairs, [&] {
            curate_pairs(records, PairMode::intra);
        }));
    }
    SECTION("None level is treated as L4") {
        std::vector<EvaluationRecord> records{
            rec("a", 0.0, std::nullopt, 0.1),
            rec("b", 0.1, SeverityLevel::L4, 0.2),
        };
        // same effective level: no inter pairs, one intra pair
        REQUIRE(raises(errc::no_eligible_pairs, [&] {
            curate_pairs(records, PairMode::inter);
        }));
        REQUIRE(curate_pairs(records, PairMode::intra).size() == 1);
    }
    SECTION("sampling is seed-deterministic and capped") {
        DeterministicRng rng(5);
        std::vector<EvaluationRecord> records;
        for (int i = 0; i < 60; ++i) {
            const auto level = static_cast<SeverityLevel>(1 + (i % 4));
            records.push_back(rec("img" + std::to_string(i),
                                  0.001 * i +
                                      0.25 * static_cast<double>(4 - (i % 4)),
                                  level, rng.next_unit()));
        }
        const auto first = curate_pairs(records, PairMode::inter, 100, 9);
        const auto second = curate_pairs(records, PairMode::inter, 100, 9);
        REQUIRE(first == second);
        REQUIRE(first.size() == 100);
        const auto other_seed = curate_pairs(records, PairMode::inter, 100, 10);
        REQUIRE(other_seed != first);
        // sampled pairs must all be eligible
        for (const auto& [i, j] : first) {
            REQUIRE(effective_level(records[i].gt_level) !=
                    effective_level(records[j].gt_level));
        }
    }
}

TEST_CASE("pairwise_accuracy") {
    const auto records = three_level_records();
    SECTION("pred == gt is fully concordant") {
        for (PairMode mode : {PairMode::inter, PairMode::intra}) {
            const auto pairs = curate_pairs(records, mode);
            REQUIRE(pairwise_accuracy(pairs, records) == 1.0);
        }
    }
    SECTION("constant predictions fail every strict comparison") {
        auto flat = records;
        for (auto& r : flat) r.pred_score = 0.5;
        const auto pairs = curate_pairs(flat, PairMode::inter);
        REQUIRE(pairwise_accuracy(pairs, flat) == 0.0);
    }
    SECTION("one concordant one discordant gives one half") {
        std::vector<EvaluationRecord> mixed{
            rec("a", 0.8, SeverityLevel::L1, 0.9),
            rec("b", 0.6, SeverityLevel::L2, 0.7), // concordant with a
            rec("c", 0.3, SeverityLevel::L3, 0.95), // discordant with a
        };
        const std::vector<IndexPair> pairs{{0, 1}, {0, 2}};
        REQUIRE(pairwise_accuracy(pairs, mixed) == 0.5);
    }
    SECTION("validation") {
        REQUIRE(raises(errc::empty_pairs, [&] {
            pairwise_accuracy({}, records);
        }));
        std::vector<EvaluationRecord> tied{
            rec("a", 0.5, SeverityLevel::L2, 0.1),
            rec("b", 0.5, SeverityLevel::L2, 0.2),
        };
        REQUIRE(raises(errc::tied_ground_truth, [&] {
            pairwise_accuracy({{0, 1}}, tied);
        }));
    }
}

TEST_CASE("level accuracy and confusion matrix") {
    const BoundarySet& bounds = canonical_boundaries();
    std::vector<EvaluationRecord> records{
        rec("a", 0.80, SeverityLevel::L1, 0.75), // L1 vs L1
        rec("b", 0.60, SeverityLevel::L2, 0.40), // L2 vs L3
        rec("c", 0.30, SeverityLevel::L3, 0.30), // L3 vs L3
        rec("d", 0.00, std::nullopt, 0.10),      // None vs L4
    };
    SECTION("accuracy counts the None row against the L4 bucket") {
        REQUIRE(level_accuracy(records, bounds) == 0.75);
    }
    SECTION("matrix layout and trace consistency") {
        const ConfusionMatrix matrix = confusion_matrix(records, bounds);
        REQUIRE(matrix.total() == 4);
        REQUIRE(matrix.cells[0][0] == 1); // L1 -> L1
        REQUIRE(matrix.cells[1][2] == 1); // L2 -> L3
        REQUIRE(matrix.cells[2][2] == 1); // L3 -> L3
        REQUIRE(matrix.cells[4][3] == 1); // None -> L4
        REQUIRE(static_cast<double>(matrix.effective_trace()) /
                    static_cast<double>(matrix.total()) ==
                level_accuracy(records, bounds));
    }
    SECTION("perfect predictions give a diagonal matrix") {
        auto perfect = records;
        for (auto& r : perfect) r.pred_score = r.gt_score;
        const ConfusionMatrix matrix = confusion_matrix(perfect, bounds);
        REQUIRE(matrix.effective_trace() == 4);
        REQUIRE(level_accuracy(perfect, bounds) == 1.0);
    }
}

TEST_CASE("compute_metrics") {
    const BoundarySet& bounds = canonical_boundaries();
    SECTION("self-evaluation is perfect") {
        std::vector<EvaluationRecord> records;
        DeterministicRng rng(3);
        for (int i = 0; i < 40; ++i) {
            const double gt = 0.001 * i + 0.25 * static_cast<double>(i % 4);
            const auto level = bucketize(std::min(gt, 1.0), bounds);
            records.push_back(rec("img" + std::to_string(i), gt, level, gt));
        }
        const MetricsReport report = compute_metrics(records, bounds, 1);
        REQUIRE(report.pearson.has_value());
        REQUIRE(*report.pearson == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(*report.spearman == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(report.mae == 0.0);
        REQUIRE(report.bias == 0.0);
        REQUIRE(report.level_accuracy == 1.0);
        REQUIRE(*report.inter_acc == 1.0);
        REQUIRE(*report.intra_acc == 1.0);
    }
    SECTION("constant predictions: null correlations, zero inter accuracy") {
        std::vector<EvaluationRecord> records{
            rec("a", 0.80, SeverityLevel::L1, 0.3),
            rec("b", 0.60, SeverityLevel::L2, 0.3),
            rec("c", 0.30, SeverityLevel::L3, 0.3),
        };
        const MetricsReport report = compute_metrics(records, bounds);
        REQUIRE_FALSE(report.pearson.has_value());
        REQUIRE_FALSE(report.spearman.has_value());
        REQUIRE(report.inter_acc.has_value());
        REQUIRE(*report.inter_acc == 0.0);
    }
    SECTION("identical report for any thread count") {
        std::vector<EvaluationRecord> records;
        DeterministicRng rng(17);
        for (int i = 0; i < 200; ++i) {
            const double gt = rng.next_unit();
            records.push_back(rec("img" + std::to_string(i), gt,
                                  bucketize(gt, bounds), rng.next_unit()));
        }
        const MetricsReport one = compute_metrics(records, bounds, 7, 500, 1);
        const MetricsReport four = compute_metrics(records, bounds, 7, 500, 4);
        REQUIRE(one.pearson == four.pearson);
        REQUIRE(one.spearman == four.spearman);
        REQUIRE(one.mae == four.mae);
        REQUIRE(one.bias == four.bias);
        REQUIRE(one.level_accuracy == four.level_accuracy);
        REQUIRE(one.inter_acc == four.inter_acc);
        REQUIRE(one.intra_acc == four.intra_acc);
        REQUIRE(one.confusion.cells == four.confusion.cells);
    }
    SECTION("permutation invariance of the scalar metrics") {
        std::vector<EvaluationRecord> records;
        DeterministicRng rng(29);
        for (int i = 0; i < 30; ++i) {
            const double gt = rng.next_unit();
            records.push_back(rec("img" + std::to_string(i), gt,
                                  bucketize(gt, bounds), rng.next_unit()));
        }
        auto shuffled = records;
        std::reverse(shuffled.begin(), shuffled.end());
        const MetricsReport a = compute_metrics(records, bounds, 0, 1 << 20);
        const MetricsReport b = compute_metrics(shuffled, bounds, 0, 1 << 20);
        // sums reassociate under permutation, so allow rounding slack there
        REQUIRE(*a.pearson == Catch::Approx(*b.pearson).margin(1e-12));
        REQUIRE(a.mae == Catch::Approx(b.mae).margin(1e-12));
        REQUIRE(a.bias == Catch::Approx(b.bias).margin(1e-12));
        // count-ratio metrics are exact regardless of record order
        REQUIRE(a.level_accuracy == b.level_accuracy);
        REQUIRE(a.inter_acc == b.inter_acc);
        REQUIRE(a.intra_acc == b.intra_acc);
    }
}
