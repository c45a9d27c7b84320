#pragma once

#include <stdexcept>
#include <string>

namespace cprt {

// Every failure the library reports, as a stable code tests and the CLI can
// dispatch on. Messages carry the specifics (line numbers, offending ids).
enum class errc {
    // taxonomy
    all_negative,
    duplicate_id,
    invalid_weights,
    level_answers_mismatch,
    // scoring
    count_out_of_range,
    score_out_of_range,
    // boundary derivation
    zero_vector,
    degenerate_dataset,
    empty_references,
    missing_level,
    non_monotone_thresholds,
    // annotation
    id_mismatch,
    length_mismatch,
    empty_input,
    bad_label_value,
    // metrics
    constant_input,
    empty_pairs,
    tied_ground_truth,
    no_eligible_pairs,
    // dataset io
    parse_error,
    unknown_attribute,
    no_score_found,
    missing_annotator,
    mode_mismatch,
    inconsistent_record,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

// Stable diagnostic names, identical to the enumerator spellings.
inline const char* errc_name(errc code) {
    switch (code) {
        case errc::all_negative: return "all_negative";
        case errc::duplicate_id: return "duplicate_id";
        case errc::invalid_weights: return "invalid_weights";
        case errc::level_answers_mismatch: return "level_answers_mismatch";
        case errc::count_out_of_range: return "count_out_of_range";
        case errc::score_out_of_range: return "score_out_of_range";
        case errc::zero_vector: return "zero_vector";
        case errc::degenerate_dataset: return "degenerate_dataset";
        case errc::empty_references: return "empty_references";
        case errc::missing_level: return "missing_level";
        case errc::non_monotone_thresholds: return "non_monotone_thresholds";
        case errc::id_mismatch: return "id_mismatch";
        case errc::length_mismatch: return "length_mismatch";
        case errc::empty_input: return "empty_input";
        case errc::bad_label_value: return "bad_label_value";
        case errc::constant_input: return "constant_input";
        case errc::empty_pairs: return "empty_pairs";
        case errc::tied_ground_truth: return "tied_ground_truth";
        case errc::no_eligible_pairs: return "no_eligible_pairs";
        case errc::parse_error: return "parse_error";
        case errc::unknown_attribute: return "unknown_attribute";
        case errc::no_score_found: return "no_score_found";
        case errc::missing_annotator: return "missing_annotator";
        case errc::mode_mismatch: return "mode_mismatch";
        case errc::inconsistent_record: return "inconsistent_record";
        case errc::io_error: return "io_error";
    }
    return "unknown";
}

} // namespace cprt
