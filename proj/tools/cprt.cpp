// CPRT command-line tool: scoring, classification, ground-truth building,
// evaluation, boundary derivation, taxonomy validation, and agreement stats.
// Exit codes: 0 ok, 1 input error, 2 property/validation failure, 3 internal.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cprt/cprt.hpp"

namespace {

int exit_code_for(cprt::errc code) {
    switch (code) {
        case cprt::errc::invalid_weights:
        case cprt::errc::level_answers_mismatch:
        case cprt::errc::non_monotone_thresholds:
        case cprt::errc::inconsistent_record:
        case cprt::errc::tied_ground_truth:
            return 2;
        default:
            return 1;
    }
}

cprt::TaxonomyRegistry resolve_registry(const std::string& taxonomy_path,
                                        const std::string& boundary_path) {
    cprt::TaxonomyRegistry registry = [&] {
        if (!taxonomy_path.empty()) return cprt::load_taxonomy(taxonomy_path);
        if (const char* env = std::getenv("CPRT_TAXONOMY")) {
            if (*env != '\0') return cprt::load_taxonomy(env);
        }
        return cprt::canonical_registry();
    }();
    if (boundary_path.empty()) return registry;
    return cprt::TaxonomyRegistry::build(registry.attributes(), registry.weights(),
                                         cprt::load_boundary_file(boundary_path));
}

std::string level_label(const std::optional<cprt::SeverityLevel>& level) {
    return level ? cprt::level_name(*level) : "safe";
}

cprt::json score_to_json(const cprt::SeverityScore& score) {
    cprt::json doc{{"score", score.value},
                   {"level", nullptr},
                   {"level_name", level_label(score.level)}};
    if (score.level) doc["level"] = cprt::level_index(*score.level);
    return doc;
}

bool parse_bool_token(std::string token) {
    for (char& c : token) c = static_cast<char>(std::tolower(c));
    if (token == "yes" || token == "y" || token == "true" || token == "1") {
        return true;
    }
    if (token == "no" || token == "n" || token == "false" || token == "0") {
        return false;
    }
    cprt::raise(cprt::errc::parse_error,
                "cannot read '" + token + "' as yes/no");
}

void print_id_list(const char* what, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    std::cerr << "warning: " << ids.size() << " " << what << ":";
    const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) std::cerr << " " << ids[i];
    if (shown < ids.size()) std::cerr << " (+" << ids.size() - shown << " more)";
    std::cerr << "\n";
}

struct DeriveInputs {
    std::vector<cprt::TrainingSample> samples;
    std::size_t skipped_empty = 0;
};

DeriveInputs training_samples_from_records(
    const std::vector<cprt::ImageRecord>& records,
    const cprt::TaxonomyRegistry& registry) {
    DeriveInputs inputs;
    for (const auto& record : records) {
        bool any = false;
        for (uint8_t b : record.merged_attributes) any = any || b != 0;
        if (!any) {
            ++inputs.skipped_empty;
            continue;
        }
        inputs.samples.push_back(cprt::TrainingSample{
            record.merged_attributes,
            cprt::max_severity_level(record.merged_attributes, registry)});
    }
    return inputs;
}

int run(int argc, char** argv) {
    CLI::App app{"Compositional privacy risk taxonomy tool"};
    app.require_subcommand(1);

    std::string taxonomy_path;
    std::string boundary_path;
    app.add_option("--taxonomy", taxonomy_path,
                   "Taxonomy JSON (default: $CPRT_TAXONOMY, else built-in)")
        ->envname("CPRT_TAXONOMY");
    app.add_option("--boundaries", boundary_path,
                   "Boundary file overriding the taxonomy's intervals");

    // score
    auto* score_cmd = app.add_subcommand("score", "Score level counts or attributes");
    std::vector<int> counts_arg;
    std::vector<std::string> attrs_arg;
    bool score_json = false;
    score_cmd->add_option("--counts", counts_arg, "Counts c1,c2,c3,c4")
        ->delimiter(',');
    score_cmd->add_option("--attrs", attrs_arg, "Attribute ids, comma separated")
        ->delimiter(',');
    score_cmd->add_flag("--json", score_json, "Full-precision JSON output");

    // classify
    auto* classify_cmd =
        app.add_subcommand("classify", "Assign a severity level from Q1..Q4 answers");
    std::vector<std::string> answers_arg;
    bool classify_json = false;
    classify_cmd
        ->add_option("--answers", answers_arg, "Four yes/no answers, comma separated")
        ->required()
        ->delimiter(',');
    classify_cmd->add_flag("--json", classify_json, "JSON output");

    // build-gt
    auto* build_cmd =
        app.add_subcommand("build-gt", "Aggregate annotations into ground truth");
    std::string build_annotations, build_output, build_mode = "dual";
    build_cmd->add_option("--annotations", build_annotations, "Annotation JSONL")
        ->required();
    build_cmd->add_option("--output", build_output, "Ground-truth JSONL output")
        ->required();
    build_cmd->add_option("--mode", build_mode, "dual|majority")
        ->check(CLI::IsMember({"dual", "majority"}));

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
    std::string eval_gt, eval_pred, eval_report, eval_csv;
    uint64_t eval_seed = 0;
    std::size_t eval_max_pairs = 10000;
    int eval_threads = 1;
    bool eval_json = false;
    eval_cmd->add_option("--ground-truth", eval_gt, "Ground-truth JSONL")->required();
    eval_cmd->add_option("--predictions", eval_pred, "Predictions JSONL")->required();
    eval_cmd->add_option("--output", eval_report, "Report JSON path");
    eval_cmd->add_option("--confusion-csv", eval_csv, "Confusion matrix CSV path");
    eval_cmd->add_option("--seed", eval_seed, "Pair-sampling seed");
    eval_cmd->add_option("--max-pairs", eval_max_pairs, "Pair cap per mode");
    eval_cmd->add_option("--threads", eval_threads, "Worker threads");
    eval_cmd->add_flag("--json", eval_json, "Print the full report to stdout");

    // derive-boundaries
    auto* derive_cmd =
        app.add_subcommand("derive-boundaries", "Derive boundaries from data");
    std::string derive_gt, derive_annotations, derive_mode = "dual";
    std::string derive_output, derive_embedding, derive_pca;
    cprt::EmbeddingHyperparams hp;
    double derive_percentile = 5.0, derive_eps = cprt::kIdwEps;
    int derive_threads = 1;
    bool derive_json = false;
    derive_cmd->add_option("--ground-truth", derive_gt,
                           "Ground-truth JSONL with attribute vectors");
    derive_cmd->add_option("--annotations", derive_annotations,
                           "Annotation JSONL (aggregated via --mode)");
    derive_cmd->add_option("--mode", derive_mode, "dual|majority")
        ->check(CLI::IsMember({"dual", "majority"}));
    derive_cmd->add_option("--output", derive_output, "Boundary file path")->required();
    derive_cmd->add_option("--embedding-out", derive_embedding, "Checkpoint path");
    derive_cmd->add_option("--pca-csv", derive_pca, "2D projection CSV path");
    derive_cmd->add_option("--dim", hp.dim, "Embedding dimension");
    derive_cmd->add_option("--epochs", hp.epochs, "Training epochs");
    derive_cmd->add_option("--learning-rate", hp.learning_rate, "AdamW learning rate");
    derive_cmd->add_option("--batch-size", hp.batch_size, "Triplets per batch");
    derive_cmd->add_option("--base-margin", hp.base_margin, "Triplet base margin");
    derive_cmd->add_option("--ordinal-scale", hp.ordinal_scale, "Ordinal margin scale");
    derive_cmd->add_option("--weight-decay", hp.weight_decay, "Decoupled weight decay");
    derive_cmd->add_option("--seed", hp.seed, "Training seed");
    derive_cmd->add_option("--percentile", derive_percentile, "Threshold percentile");
    derive_cmd->add_option("--eps", derive_eps, "IDW epsilon");
    derive_cmd->add_option("--threads", derive_threads, "Worker threads");
    derive_cmd->add_flag("--json", derive_json, "Print derivation JSON to stdout");

    // validate
    auto* validate_cmd =
        app.add_subcommand("validate", "Exhaustive scoring property check");
    bool validate_json = false;
    validate_cmd->add_flag("--json", validate_json, "JSON output");

    // agreement
    auto* agree_cmd =
        app.add_subcommand("agreement", "Inter-annotator agreement statistics");
    std::string agree_annotations;
    bool agree_json = false, agree_consensus = false;
    agree_cmd->add_option("--annotations", agree_annotations, "Annotation JSONL")
        ->required();
    agree_cmd->add_flag("--consensus", agree_consensus,
                        "Also report strict all-annotator consensus");
    agree_cmd->add_flag("--json", agree_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const cprt::TaxonomyRegistry registry =
        resolve_registry(taxonomy_path, boundary_path);

    if (score_cmd->parsed()) {
        if (counts_arg.empty() == attrs_arg.empty()) {
            std::cerr << "error: pass exactly one of --counts or --attrs\n";
            return 1;
        }
        cprt::SeverityScore score;
        if (!counts_arg.empty()) {
            if (counts_arg.size() != 4) {
                cprt::raise(cprt::errc::parse_error, "--counts needs 4 values");
            }
            const cprt::LevelCounts counts{counts_arg[0], counts_arg[1],
                                           counts_arg[2], counts_arg[3]};
            score = cprt::severity_score(counts, registry);
        } else {
            std::vector<uint8_t> bits(registry.attribute_count(), 0);
            for (const auto& id : attrs_arg) {
                const auto index = registry.index_of(id);
                if (!index) {
                    cprt::raise(cprt::errc::unknown_attribute,
                                "unknown attribute '" + id + "'");
                }
                bits[*index] = 1;
            }
            score = cprt::score_attribute_vector(bits, registry);
        }
        if (score_json) {
            std::cout << score_to_json(score).dump(2) << "\n";
        } else {
            std::printf("score: %.3f\nlevel: %s\n", score.value,
                        level_label(score.level).c_str());
        }
        return 0;
    }

    if (classify_cmd->parsed()) {
        if (answers_arg.size() != 4) {
            cprt::raise(cprt::errc::parse_error, "--answers needs 4 values");
        }
        cprt::DecisionAnswers answers{};
        for (std::size_t i = 0; i < 4; ++i) {
            answers[i] = parse_bool_token(answers_arg[i]);
        }
        const cprt::SeverityLevel level = cprt::classify_attribute(answers);
        if (classify_json) {
            std::cout << cprt::json{{"level", cprt::level_index(level)},
                                    {"level_name", cprt::level_name(level)}}
                             .dump(2)
                      << "\n";
        } else {
            std::cout << cprt::level_name(level) << "\n";
        }
        return 0;
    }

    if (build_cmd->parsed()) {
        const auto annotations = cprt::load_annotations(build_annotations, registry);
        const auto records = cprt::build_ground_truth(
            annotations, registry, cprt::ground_truth_mode_from_string(build_mode));
        cprt::write_ground_truth(records, registry, build_output);
        std::cout << "wrote " << records.size() << " records to " << build_output
                  << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        const auto ground_truth = cprt::load_ground_truth(eval_gt, registry);
        const auto predictions = cprt::load_predictions(eval_pred);
        const auto joined = cprt::join_evaluation(ground_truth, predictions);
        print_id_list("ground-truth ids without prediction", joined.missing_prediction);
        print_id_list("prediction ids without ground truth", joined.unknown_prediction);
        const auto report =
            cprt::compute_metrics(joined.records, registry.boundaries(), eval_seed,
                                  eval_max_pairs, eval_threads);
        const std::string boundary_source =
            !boundary_path.empty()
                ? boundary_path
                : (!taxonomy_path.empty() ? taxonomy_path : "canonical");
        if (!eval_report.empty()) {
            cprt::write_report(report, eval_report, boundary_source);
        }
        if (!eval_csv.empty()) {
            cprt::detail::write_file(eval_csv,
                                     cprt::confusion_to_csv(report.confusion));
        }
        if (eval_json) {
            std::cout << cprt::metrics_report_to_json(report, boundary_source).dump(2)
                      << "\n";
        } else {
            auto line = [](const char* name, const std::optional<double>& v) {
                if (v) {
                    std::printf("%s: %.3f\n", name, *v);
                } else {
                    std::printf("%s: n/a\n", name);
                }
            };
            std::printf("n: %zu\n", report.n);
            line("pearson", report.pearson);
            line("spearman", report.spearman);
            std::printf("mae: %.3f\nbias: %+.3f\nlevel_accuracy: %.3f\n",
                        report.mae, report.bias, report.level_accuracy);
            line("inter_acc", report.inter_acc);
            line("intra_acc", report.intra_acc);
        }
        return 0;
    }

    if (derive_cmd->parsed()) {
        if (derive_gt.empty() == derive_annotations.empty()) {
            std::cerr << "error: pass exactly one of --ground-truth or --annotations\n";
            return 1;
        }
        std::vector<cprt::ImageRecord> records;
        if (!derive_gt.empty()) {
            records = cprt::load_ground_truth(derive_gt, registry);
        } else {
            const auto annotations =
                cprt::load_annotations(derive_annotations, registry);
            records = cprt::build_ground_truth(
                annotations, registry,
                cprt::ground_truth_mode_from_string(derive_mode));
        }
        const DeriveInputs inputs = training_samples_from_records(records, registry);
        if (inputs.skipped_empty > 0) {
            std::cerr << "warning: skipped " << inputs.skipped_empty
                      << " attribute-free record(s)\n";
        }
        const cprt::TrainResult trained =
            cprt::train_embeddings(inputs.samples, hp, registry.attribute_count());

        std::vector<cprt::EmbeddedSample> refs;
        refs.reserve(inputs.samples.size());
        for (const auto& sample : inputs.samples) {
            refs.push_back(cprt::EmbeddedSample{cprt::embed(sample.bits, trained.model),
                                                sample.level});
        }
        const cprt::BoundaryDerivation derivation = cprt::extract_boundaries(
            refs, derive_percentile, derive_eps, derive_threads);
        cprt::write_boundary_file(derivation, hp, derive_output);
        if (!derive_embedding.empty()) {
            cprt::write_embedding(trained.model, derive_embedding);
        }
        if (!derive_pca.empty()) {
            cprt::detail::write_file(derive_pca,
                                     cprt::projection_to_csv(cprt::pca_2d(refs), refs));
        }
        if (derive_json) {
            std::cout << cprt::boundary_derivation_to_json(derivation, hp).dump(2)
                      << "\n";
        } else {
            std::printf(
                "samples: %zu\nloss: %.4f -> %.4f\nlower edges: %.3f %.3f %.3f %.3f\n",
                inputs.samples.size(), trained.epoch_mean_loss.front(),
                trained.epoch_mean_loss.back(),
                derivation.boundaries.lower(cprt::SeverityLevel::L1),
                derivation.boundaries.lower(cprt::SeverityLevel::L2),
                derivation.boundaries.lower(cprt::SeverityLevel::L3),
                derivation.boundaries.lower(cprt::SeverityLevel::L4));
        }
        std::cout << "wrote " << derive_output << "\n";
        return 0;
    }

    if (validate_cmd->parsed()) {
        const cprt::EnumerationCheck check = cprt::check_scoring_properties(registry);
        if (validate_json) {
            std::cout << cprt::json{{"combinations", check.combination_count},
                                    {"ok", check.ok},
                                    {"first_failure", check.first_failure}}
                             .dump(2)
                      << "\n";
        } else {
            std::cout << check.combination_count << " combinations, "
                      << (check.ok ? "all properties hold"
                                   : "FAILED: " + check.first_failure)
                      << "\n";
        }
        return check.ok ? 0 : 2;
    }

    if (agree_cmd->parsed()) {
        const auto annotations = cprt::load_annotations(agree_annotations, registry);
        const cprt::AgreementReport report =
            cprt::agreement_report(annotations, registry.attribute_count());
        std::optional<double> consensus;
        if (agree_consensus) {
            std::map<std::string, std::vector<std::vector<uint8_t>>> by_image;
            for (const auto& record : annotations) {
                by_image[record.image_id].push_back(cprt::binarize(record.labels));
            }
            std::size_t unanimous = 0, cells = 0;
            for (const auto& [image, rows] : by_image) {
                if (rows.size() < 2) continue;
                for (std::size_t k = 0; k < rows.front().size(); ++k) {
                    bool all_same = true;
                    for (std::size_t r = 1; r < rows.size(); ++r) {
                        all_same = all_same && rows[r][k] == rows[0][k];
                    }
                    unanimous += all_same ? 1 : 0;
                    ++cells;
                }
            }
            if (cells == 0) {
                cprt::raise(cprt::errc::empty_input,
                            "no image has two or more annotators");
            }
            consensus = static_cast<double>(unanimous) / static_cast<double>(cells);
        }
        if (agree_json) {
            cprt::json doc = cprt::agreement_report_to_json(report);
            if (consensus) doc["strict_consensus"] = *consensus;
            std::cout << doc.dump(2) << "\n";
        } else {
            std::printf("images: %zu\npairs: %zu\npercent_agreement: %.3f\n",
                        report.n_images, report.n_pairs, report.percent_agreement);
            std::printf("cohen_kappa: %.3f%s\n", report.cohen_kappa,
                        report.kappa_degenerate ? " (degenerate pair present)" : "");
            if (consensus) std::printf("strict_consensus: %.3f\n", *consensus);
        }
        return 0;
    }

    std::cerr << "error: no subcommand\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cprt::Error& e) {
        std::cerr << "error [" << cprt::errc_name(e.code()) << "]: " << e.what()
                  << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
