#pragma once

// File formats: taxonomy JSON, annotation/ground-truth/prediction JSONL,
// metric reports, boundary files, and embedding checkpoints. Ingestion is
// strict (malformed lines abort with their line number); serialization uses
// sorted keys and shortest round-trip doubles, so equal inputs produce
// byte-identical files.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cprt/annotation.hpp"
#include "cprt/boundary_derivation.hpp"
#include "cprt/embedding.hpp"
#include "cprt/error.hpp"
#include "cprt/metrics.hpp"
#include "cprt/scoring.hpp"
#include "cprt/taxonomy.hpp"
#include "cprt/version.hpp"

namespace cprt {

using json = nlohmann::json;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) raise(errc::io_error, "read failure on '" + path + "'");
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_error, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) raise(errc::io_error, "write failure on '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& where) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        raise(errc::parse_error, where + ": invalid JSON");
    }
    return parsed;
}

// Splits into lines, dropping a trailing empty line; keeps 1-based numbers.
inline std::vector<std::pair<std::size_t, std::string>> numbered_lines(
    const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::size_t start = 0, number = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.emplace_back(number, std::move(line));
        if (end == text.size()) break;
        start = end + 1;
        ++number;
    }
    return lines;
}

inline std::string line_tag(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line);
}

// Missing or mistyped fields surface as parse errors, not library internals.
template <typename Fn>
auto json_guard(const std::string& where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        raise(errc::parse_error, where + ": " + e.what());
    }
}

} // namespace detail

// --- taxonomy files ---------------------------------------------------------

inline json taxonomy_to_json(const TaxonomyRegistry& registry) {
    json attributes = json::array();
    for (const auto& attr : registry.attributes()) {
        json answers = json::array();
        for (bool a : attr.decision_answers) answers.push_back(a);
        attributes.push_back({{"id", attr.id},
                              {"name", attr.name},
                              {"level", level_index(attr.level)},
                              {"subcategory", attr.subcategory},
                              {"answers", answers}});
    }
    json boundaries = json::array();
    for (int l = 1; l <= 4; ++l) {
        const auto level = static_cast<SeverityLevel>(l);
        boundaries.push_back(
            {registry.boundaries().lower(level), registry.boundaries().upper(level)});
    }
    return json{{"attributes", attributes},
                {"weights", registry.weights()},
                {"boundaries", boundaries}};
}

inline TaxonomyRegistry taxonomy_from_json(const json& doc, const std::string& where) {
    if (!doc.is_object() || !doc.contains("attributes") || !doc.contains("weights") ||
        !doc.contains("boundaries")) {
        raise(errc::parse_error,
              where + ": taxonomy needs attributes, weights, boundaries");
    }
    return detail::json_guard(where, [&] {
        std::vector<AttributeSpec> specs;
        for (const auto& entry : doc.at("attributes")) {
            AttributeSpec spec;
            spec.id = entry.at("id").get<std::string>();
            spec.name = entry.value("name", spec.id);
            spec.level = severity_level_from_int(entry.at("level").get<int>());
            spec.subcategory = entry.value("subcategory", std::string{});
            const auto& answers = entry.at("answers");
            if (!answers.is_array() || answers.size() != 4) {
                raise(errc::parse_error,
                      where + ": attribute '" + spec.id + "' needs 4 answers");
            }
            for (std::size_t i = 0; i < 4; ++i) {
                spec.decision_answers[i] = answers[i].get<bool>();
            }
            specs.push_back(std::move(spec));
        }

        const auto& weights_json = doc.at("weights");
        if (!weights_json.is_array() || weights_json.size() != 4) {
            raise(errc::parse_error, where + ": weights must be a 4-array");
        }
        WeightVector weights{};
        for (std::size_t i = 0; i < 4; ++i) weights[i] = weights_json[i].get<int64_t>();

        const auto& bounds_json = doc.at("boundaries");
        if (!bounds_json.is_array() || bounds_json.size() != 4) {
            raise(errc::parse_error, where + ": boundaries must be 4 intervals");
        }
        std::array<double, 4> lower{};
        std::array<double, 4> upper{};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& interval = bounds_json[i];
            if (!interval.is_array() || interval.size() != 2) {
                raise(errc::parse_error, where + ": each boundary is a [lo, hi] pair");
            }
            lower[i] = interval[0].get<double>();
            upper[i] = interval[1].get<double>();
        }
        for (std::size_t i = 0; i + 1 < 4; ++i) {
            if (upper[i + 1] != lower[i]) {
                raise(errc::parse_error,
                      where + ": boundary intervals must be adjacent");
            }
        }
        if (upper[0] != 1.0) {
            raise(errc::parse_error, where + ": level-1 interval must close at 1");
        }
        return TaxonomyRegistry::build(specs, weights,
                                       BoundarySet::from_lower_edges(lower));
    });
}

inline TaxonomyRegistry load_taxonomy(const std::string& path) {
    return taxonomy_from_json(detail::parse_json(detail::read_file(path), path), path);
}

inline void save_taxonomy(const TaxonomyRegistry& registry, const std::string& path) {
    detail::write_file(path, taxonomy_to_json(registry).dump(2) + "\n");
}

// --- annotations ------------------------------------------------------------

inline std::vector<AnnotationRecord> load_annotations(const std::string& path,
                                                      const TaxonomyRegistry& registry) {
    std::vector<AnnotationRecord> records;
    for (const auto& [number, line] : detail::numbered_lines(detail::read_file(path))) {
        const std::string where = detail::line_tag(path, number);
        json entry = detail::parse_json(line, where);
        if (!entry.is_object() || !entry.contains("image_id") ||
            !entry.contains("annotator_id") || !entry.contains("labels")) {
            raise(errc::parse_error,
                  where + ": need image_id, annotator_id, labels");
        }
        detail::json_guard(where, [&] {
            AnnotationRecord record;
            record.image_id = entry.at("image_id").get<std::string>();
            record.annotator_id = entry.at("annotator_id").get<std::string>();
            record.labels.assign(registry.attribute_count(), Label::absent);

            const auto& labels = entry.at("labels");
            if (!labels.is_object()) {
                raise(errc::parse_error,
                      where + ": labels must map attribute to value");
            }
            for (const auto& [attr_id, value] : labels.items()) {
                const auto index = registry.index_of(attr_id);
                if (!index) {
                    raise(errc::unknown_attribute,
                          where + ": unknown attribute '" + attr_id + "'");
                }
                if (!value.is_number()) {
                    raise(errc::bad_label_value,
                          where + ": label for '" + attr_id + "' must be numeric");
                }
                try {
                    record.labels[*index] = label_from_value(value.get<double>());
                } catch (const Error&) {
                    raise(errc::bad_label_value,
                          where + ": label for '" + attr_id + "' not in {0, 0.5, 1}");
                }
            }
            if (entry.contains("rationale")) {
                record.rationales.assign(registry.attribute_count(), "");
                for (const auto& [attr_id, text] : entry.at("rationale").items()) {
                    const auto index = registry.index_of(attr_id);
                    if (!index) {
                        raise(errc::unknown_attribute,
                              where + ": unknown attribute '" + attr_id + "'");
                    }
                    record.rationales[*index] = text.get<std::string>();
                }
            }
            records.push_back(std::move(record));
        });
    }
    return records;
}

// --- ground truth -----------------------------------------------------------

struct ImageRecord {
    std::string image_id;
    std::vector<uint8_t> merged_attributes;
    double gt_score = 0.0;
    std::optional<SeverityLevel> gt_level;
    std::string source_split;
};

enum class GroundTruthMode { dual, majority };

inline GroundTruthMode ground_truth_mode_from_string(const std::string& name) {
    if (name == "dual") return GroundTruthMode::dual;
    if (name == "majority") return GroundTruthMode::majority;
    raise(errc::mode_mismatch, "unknown ground-truth mode '" + name + "'");
}

// Merge per image (order-independent over annotator ordering), then score.
inline std::vector<ImageRecord> build_ground_truth(
    const std::vector<AnnotationRecord>& annotations,
    const TaxonomyRegistry& registry, GroundTruthMode mode) {
    std::vector<std::string> image_order;
    std::map<std::string, std::vector<const AnnotationRecord*>> by_image;
    for (const auto& record : annotations) {
        if (record.labels.size() != registry.attribute_count()) {
            raise(errc::length_mismatch,
                  "record for '" + record.image_id + "' has wrong label count");
        }
        auto& slot = by_image[record.image_id];
        if (slot.empty()) image_order.push_back(record.image_id);
        slot.push_back(&record);
    }

    std::vector<ImageRecord> records;
    records.reserve(image_order.size());
    for (const auto& image : image_order) {
        auto annotators = by_image[image];
        std::sort(annotators.begin(), annotators.end(),
                  [](const AnnotationRecord* a, const AnnotationRecord* b) {
                      return a->annotator_id < b->annotator_id;
                  });
        for (std::size_t i = 1; i < annotators.size(); ++i) {
            if (annotators[i]->annotator_id == annotators[i - 1]->annotator_id) {
                raise(errc::inconsistent_record,
                      "duplicate annotator '" + annotators[i]->annotator_id +
                          "' for image '" + image + "'");
            }
        }

        std::vector<uint8_t> merged;
        if (mode == GroundTruthMode::dual) {
            if (annotators.size() < 2) {
                raise(errc::missing_annotator,
                      "image '" + image + "' has " +
                          std::to_string(annotators.size()) +
                          " annotator(s), dual mode needs 2");
            }
            if (annotators.size() > 2) {
                raise(errc::mode_mismatch,
                      "image '" + image + "' has " +
                          std::to_string(annotators.size()) +
                          " annotators, dual mode takes exactly 2");
            }
            merged = merge_dual(*annotators[0], *annotators[1]);
        } else {
            std::vector<std::vector<uint8_t>> votes;
            votes.reserve(annotators.size());
            for (const auto* a : annotators) votes.push_back(binarize(a->labels));
            merged = majority_vote_vectors(votes);
        }

        const SeverityScore score = score_attribute_vector(merged, registry);
        records.push_back(ImageRecord{image, std::move(merged), score.value,
                                      score.level, ""});
    }
    return records;
}

inline json image_record_to_json(const ImageRecord& record,
                                 const TaxonomyRegistry& registry) {
    json attributes = json::array();
    for (std::size_t i = 0; i < record.merged_attributes.size(); ++i) {
        if (record.merged_attributes[i]) {
            attributes.push_back(registry.attributes()[i].id);
        }
    }
    json entry{{"image_id", record.image_id},
               {"attributes", attributes},
               {"gt_score", record.gt_score},
               {"gt_level", nullptr}};
    if (record.gt_level) entry["gt_level"] = level_index(*record.gt_level);
    if (!record.source_split.empty()) entry["split"] = record.source_split;
    return entry;
}

inline void write_ground_truth(const std::vector<ImageRecord>& records,
                               const TaxonomyRegistry& registry,
                               const std::string& path) {
    std::ostringstream out;
    for (const auto& record : records) {
        out << image_record_to_json(record, registry).dump() << "\n";
    }
    detail::write_file(path, out.str());
}

inline std::vector<ImageRecord> load_ground_truth(const std::string& path,
                                                  const TaxonomyRegistry& registry) {
    std::vector<ImageRecord> records;
    for (const auto& [number, line] : detail::numbered_lines(detail::read_file(path))) {
        const std::string where = detail::line_tag(path, number);
        json entry = detail::parse_json(line, where);
        if (!entry.is_object() || !entry.contains("image_id") ||
            !entry.contains("attributes") || !entry.contains("gt_score")) {
            raise(errc::parse_error,
                  where + ": need image_id, attributes, gt_score");
        }
        detail::json_guard(where, [&] {
            ImageRecord record;
            record.image_id = entry.at("image_id").get<std::string>();
            record.merged_attributes.assign(registry.attribute_count(), 0);
            for (const auto& attr_id : entry.at("attributes")) {
                const auto index = registry.index_of(attr_id.get<std::string>());
                if (!index) {
                    raise(errc::unknown_attribute,
                          where + ": unknown attribute '" +
                              attr_id.get<std::string>() + "'");
                }
                record.merged_attributes[*index] = 1;
            }
            record.gt_score = entry.at("gt_score").get<double>();
            if (entry.contains("gt_level") && !entry.at("gt_level").is_null()) {
                record.gt_level =
                    severity_level_from_int(entry.at("gt_level").get<int>());
            }
            record.source_split = entry.value("split", std::string{});

            const SeverityScore recomputed =
                score_attribute_vector(record.merged_attributes, registry);
            if (std::abs(recomputed.value - record.gt_score) > 1e-9 ||
                recomputed.level != record.gt_level) {
                raise(errc::inconsistent_record,
                      where + ": stored score " + std::to_string(record.gt_score) +
                          " does not match attributes (recomputed " +
                          std::to_string(recomputed.value) + ")");
            }
            records.push_back(std::move(record));
        });
    }
    return records;
}

// --- predictions ------------------------------------------------------------

struct Prediction {
    std::string image_id;
    double score = 0.0;
};

// Extraction order: a structured "score" field when the text parses as JSON,
// else the first unsigned decimal literal. The value must land in [0, 1].
inline double parse_model_response(const std::string& text) {
    if (text.empty()) raise(errc::no_score_found, "empty response");
    json parsed = json::parse(text, nullptr, false);
    std::optional<double> value;
    if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("score")) {
        const auto& field = parsed.at("score");
        if (field.is_number()) {
            value = field.get<double>();
        } else if (field.is_string()) {
            json inner = json::parse(field.get<std::string>(), nullptr, false);
            if (inner.is_number()) value = inner.get<double>();
        }
    }
    if (!value) {
        // first unsigned decimal literal: digits[.digits] or .digits
        const std::size_t n = text.size();
        for (std::size_t i = 0; i < n && !value; ++i) {
            const bool digit = text[i] >= '0' && text[i] <= '9';
            const bool dot_start = text[i] == '.' && i + 1 < n &&
                                   text[i + 1] >= '0' && text[i + 1] <= '9';
            if (!digit && !dot_start) continue;
            std::size_t j = i;
            while (j < n && text[j] >= '0' && text[j] <= '9') ++j;
            if (j < n && text[j] == '.' && j + 1 < n && text[j + 1] >= '0' &&
                text[j + 1] <= '9') {
                ++j;
                while (j < n && text[j] >= '0' && text[j] <= '9') ++j;
            }
            value = std::stod(text.substr(i, j - i));
        }
    }
    if (!value) raise(errc::no_score_found, "no score in response");
    if (!(*value >= 0.0 && *value <= 1.0)) {
        raise(errc::score_out_of_range,
              "extracted score " + std::to_string(*value) + " outside [0, 1]");
    }
    return *value;
}

inline std::vector<Prediction> load_predictions(const std::string& path) {
    std::vector<Prediction> predictions;
    std::map<std::string, std::size_t> seen;
    for (const auto& [number, line] : detail::numbered_lines(detail::read_file(path))) {
        const std::string where = detail::line_tag(path, number);
        json entry = detail::parse_json(line, where);
        if (!entry.is_object() || !entry.contains("image_id")) {
            raise(errc::parse_error, where + ": need image_id");
        }
        detail::json_guard(where, [&] {
            Prediction prediction;
            prediction.image_id = entry.at("image_id").get<std::string>();
            if (auto it = seen.find(prediction.image_id); it != seen.end()) {
                raise(errc::duplicate_id,
                      where + ": duplicate prediction for '" + prediction.image_id +
                          "' (first at line " + std::to_string(it->second) + ")");
            }
            seen.emplace(prediction.image_id, number);
            if (entry.contains("score")) {
                if (!entry.at("score").is_number()) {
                    raise(errc::parse_error, where + ": score must be numeric");
                }
                prediction.score = entry.at("score").get<double>();
                if (!(prediction.score >= 0.0 && prediction.score <= 1.0)) {
                    raise(errc::score_out_of_range,
                          where + ": score " + std::to_string(prediction.score) +
                              " outside [0, 1]");
                }
            } else if (entry.contains("raw_response")) {
                try {
                    prediction.score = parse_model_response(
                        entry.at("raw_response").get<std::string>());
                } catch (const Error& e) {
                    raise(e.code(), where + ": " + e.what());
                }
            } else {
                raise(errc::parse_error, where + ": need score or raw_response");
            }
            predictions.push_back(std::move(prediction));
        });
    }
    return predictions;
}

struct JoinResult {
    std::vector<EvaluationRecord> records;      // gt order, intersection only
    std::vector<std::string> missing_prediction; // gt ids without prediction
    std::vector<std::string> unknown_prediction; // prediction ids without gt
};

inline JoinResult join_evaluation(const std::vector<ImageRecord>& ground_truth,
                                  const std::vector<Prediction>& predictions) {
    std::map<std::string, double> by_id;
    for (const auto& p : predictions) by_id.emplace(p.image_id, p.score);
    JoinResult joined;
    std::map<std::string, bool> matched;
    for (const auto& gt : ground_truth) {
        auto it = by_id.find(gt.image_id);
        if (it == by_id.end()) {
            joined.missing_prediction.push_back(gt.image_id);
            continue;
        }
        matched[gt.image_id] = true;
        joined.records.push_back(
            EvaluationRecord{gt.image_id, gt.gt_score, gt.gt_level, it->second});
    }
    for (const auto& p : predictions) {
        if (!matched.count(p.image_id)) {
            joined.unknown_prediction.push_back(p.image_id);
        }
    }
    return joined;
}

// --- reports ----------------------------------------------------------------

inline json confusion_to_json(const ConfusionMatrix& matrix) {
    json rows = json::array();
    for (const auto& row : matrix.cells) {
        rows.push_back(row);
    }
    return rows;
}

inline std::string confusion_to_csv(const ConfusionMatrix& matrix) {
    static const std::array<const char*, 5> kRowNames{"L1", "L2", "L3", "L4",
                                                      "None"};
    std::ostringstream out;
    out << "gt_level,pred_L1,pred_L2,pred_L3,pred_L4\n";
    for (std::size_t r = 0; r < ConfusionMatrix::kRows; ++r) {
        out << kRowNames[r];
        for (std::size_t c = 0; c < ConfusionMatrix::kCols; ++c) {
            out << "," << matrix.cells[r][c];
        }
        out << "\n";
    }
    return out.str();
}

inline json metrics_report_to_json(const MetricsReport& report,
                                   const std::string& boundary_source) {
    json doc{{"pearson", nullptr},
             {"spearman", nullptr},
             {"mae", report.mae},
             {"bias", report.bias},
             {"level_accuracy", report.level_accuracy},
             {"inter_acc", nullptr},
             {"intra_acc", nullptr},
             {"confusion", confusion_to_json(report.confusion)},
             {"n", report.n},
             {"pair_counts",
              {{"inter", report.inter_pairs}, {"intra", report.intra_pairs}}},
             {"metadata",
              {{"seed", report.seed},
               {"max_pairs", report.max_pairs},
               {"boundary_source", boundary_source},
               {"tool_version", kVersion}}}};
    if (report.pearson) doc["pearson"] = *report.pearson;
    if (report.spearman) doc["spearman"] = *report.spearman;
    if (report.inter_acc) doc["inter_acc"] = *report.inter_acc;
    if (report.intra_acc) doc["intra_acc"] = *report.intra_acc;
    return doc;
}

inline void write_report(const MetricsReport& report, const std::string& path,
                         const std::string& boundary_source) {
    detail::write_file(path,
                       metrics_report_to_json(report, boundary_source).dump(2) + "\n");
}

inline json agreement_report_to_json(const AgreementReport& report) {
    return json{{"percent_agreement", report.percent_agreement},
                {"cohen_kappa", report.cohen_kappa},
                {"kappa_degenerate", report.kappa_degenerate},
                {"per_attribute_agreement", report.per_attribute_agreement},
                {"n_items", report.n_items},
                {"n_images", report.n_images},
                {"n_pairs", report.n_pairs},
                {"metadata", {{"kappa_aggregation", report.kappa_aggregation},
                              {"tool_version", kVersion}}}};
}

// --- boundary files ---------------------------------------------------------

inline json boundary_derivation_to_json(const BoundaryDerivation& derivation,
                                        const EmbeddingHyperparams& hyperparams) {
    json boundaries = json::array();
    for (int l = 1; l <= 4; ++l) {
        const auto level = static_cast<SeverityLevel>(l);
        boundaries.push_back({derivation.boundaries.lower(level),
                              derivation.boundaries.upper(level)});
    }
    return json{
        {"boundaries", boundaries},
        {"metadata",
         {{"raw_thresholds", derivation.raw_thresholds},
          {"percentile_scores", derivation.percentile_scores},
          {"samples_per_level", derivation.samples_per_level},
          {"percentile", derivation.percentile},
          {"eps", derivation.eps},
          {"hyperparams",
           {{"dim", hyperparams.dim},
            {"base_margin", hyperparams.base_margin},
            {"ordinal_scale", hyperparams.ordinal_scale},
            {"epochs", hyperparams.epochs},
            {"learning_rate", hyperparams.learning_rate},
            {"batch_size", hyperparams.batch_size},
            {"weight_decay", hyperparams.weight_decay},
            {"seed", hyperparams.seed}}},
          {"tool_version", kVersion}}}};
}

inline void write_boundary_file(const BoundaryDerivation& derivation,
                                const EmbeddingHyperparams& hyperparams,
                                const std::string& path) {
    detail::write_file(path,
                       boundary_derivation_to_json(derivation, hyperparams).dump(2) +
                           "\n");
}

inline BoundarySet load_boundary_file(const std::string& path) {
    json doc = detail::parse_json(detail::read_file(path), path);
    if (!doc.is_object() || !doc.contains("boundaries")) {
        raise(errc::parse_error, path + ": boundary file needs 'boundaries'");
    }
    const auto& intervals = doc.at("boundaries");
    if (!intervals.is_array() || intervals.size() != 4) {
        raise(errc::parse_error, path + ": boundaries must be 4 intervals");
    }
    return detail::json_guard(path, [&] {
        std::array<double, 4> lower{};
        for (std::size_t i = 0; i < 4; ++i) {
            lower[i] = intervals[i][0].get<double>();
        }
        return BoundarySet::from_lower_edges(lower);
    });
}

// --- embedding checkpoints ----------------------------------------------------

inline json embedding_to_json(const EmbeddingModel& model) {
    json rows = json::array();
    const std::size_t dim = static_cast<std::size_t>(model.hyperparams.dim);
    for (std::size_t i = 0; i < model.attribute_count; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < dim; ++k) row.push_back(model.row(i)[k]);
        rows.push_back(std::move(row));
    }
    return json{{"attribute_count", model.attribute_count},
                {"hyperparams",
                 {{"dim", model.hyperparams.dim},
                  {"base_margin", model.hyperparams.base_margin},
                  {"ordinal_scale", model.hyperparams.ordinal_scale},
                  {"epochs", model.hyperparams.epochs},
                  {"learning_rate", model.hyperparams.learning_rate},
                  {"batch_size", model.hyperparams.batch_size},
                  {"weight_decay", model.hyperparams.weight_decay},
                  {"seed", model.hyperparams.seed}}},
                {"matrix", rows}};
}

inline void write_embedding(const EmbeddingModel& model, const std::string& path) {
    detail::write_file(path, embedding_to_json(model).dump(2) + "\n");
}

inline EmbeddingModel load_embedding(const std::string& path) {
    json doc = detail::parse_json(detail::read_file(path), path);
    if (!doc.is_object() || !doc.contains("matrix") || !doc.contains("hyperparams")) {
        raise(errc::parse_error, path + ": checkpoint needs matrix and hyperparams");
    }
    return detail::json_guard(path, [&] {
        EmbeddingModel model;
        const auto& hp = doc.at("hyperparams");
        model.hyperparams.dim = hp.at("dim").get<int>();
        model.hyperparams.base_margin = hp.at("base_margin").get<double>();
        model.hyperparams.ordinal_scale = hp.at("ordinal_scale").get<double>();
        model.hyperparams.epochs = hp.at("epochs").get<int>();
        model.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
        model.hyperparams.batch_size = hp.at("batch_size").get<int>();
        model.hyperparams.weight_decay = hp.at("weight_decay").get<double>();
        model.hyperparams.seed = hp.at("seed").get<uint64_t>();
        model.attribute_count = doc.at("attribute_count").get<std::size_t>();

        const std::size_t dim = static_cast<std::size_t>(model.hyperparams.dim);
        const auto& rows = doc.at("matrix");
        if (!rows.is_array() || rows.size() != model.attribute_count) {
            raise(errc::parse_error, path + ": matrix row count mismatch");
        }
        model.matrix.reserve(model.attribute_count * dim);
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != dim) {
                raise(errc::parse_error, path + ": matrix column count mismatch");
            }
            for (const auto& v : row) model.matrix.push_back(v.get<double>());
        }
        return model;
    });
}

// --- PCA export ---------------------------------------------------------------

inline std::string projection_to_csv(const Projection2D& projection,
                                     const std::vector<EmbeddedSample>& refs) {
    if (projection.points.size() != refs.size()) {
        raise(errc::length_mismatch, "projection and samples differ in length");
    }
    std::ostringstream out;
    out.precision(17);
    out << "x,y,level\n";
    for (std::size_t i = 0; i < refs.size(); ++i) {
        out << projection.points[i][0] << "," << projection.points[i][1] << ","
            << level_index(refs[i].level) << "\n";
    }
    return out.str();
}

} // namespace cprt
