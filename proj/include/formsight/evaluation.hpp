#pragma once

#include "formsight/corpus.hpp"
#include "formsight/extraction.hpp"
#include "formsight/fraction.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace formsight {

// Scoring normalization: strip leading/trailing whitespace, then case-fold
// (ASCII). Internal whitespace and punctuation are preserved, so
// "A1A1A1" != "A1A 1A1".
std::string normalize(std::string_view value);

// Binary exact match after normalization.
bool match_field(std::string_view gold, std::string_view predicted);

struct ScoreCell {
    std::string scenario_id;
    std::string variant;
    std::string field;
    std::string gold;
    std::string predicted;
    bool correct = false;
    std::string error;  // sample-level failure annotation, empty otherwise
};

// Per-(sample, field) correctness covering exactly samples x schema keys.
// Cells are in canonical order (scenario, then variant, then schema field
// order) regardless of manifest order.
struct ScoreMatrix {
    std::vector<std::string> fields;     // schema key order
    std::vector<std::string> scenarios;  // lexicographic
    std::vector<std::string> variants;   // canonical rank, then lexicographic
    std::vector<ScoreCell> cells;

    Fraction overall() const;
};

// Scores predictions against the manifest's gold labels. Samples listed in
// `failures` score all-incorrect with the failure message attached. Every
// sample must appear in exactly one of the two maps (keyed by Sample::id()),
// and every prediction must cover the schema key set exactly.
ScoreMatrix score_run(const Manifest& manifest,
                      const std::map<std::string, FieldValues>& predictions,
                      const std::map<std::string, std::string>& failures = {});

enum class GroupAxis { scenario, variant };

// Grouped means over a ScoreMatrix, all values exact fractions. field_avg is
// the Average column (equal-weight mean over groups), group_avg the Average
// row (mean over fields), overall the grand mean of the cell grid.
struct AccuracyTable {
    std::vector<std::string> fields;
    std::vector<std::string> groups;
    std::vector<std::vector<Fraction>> cells;  // [field][group]
    std::vector<Fraction> field_avg;
    std::vector<Fraction> group_avg;
    Fraction overall;
};

AccuracyTable aggregate_by(const ScoreMatrix& matrix, GroupAxis axis);

struct HeatmapCell {
    std::string scenario_id;
    std::string variant;
    Fraction accuracy;  // mean correctness over the sample's fields
};

std::vector<HeatmapCell> heatmap_grid(const ScoreMatrix& matrix);

// Test driver: corrupts each gold field independently with probability
// error_rate, guaranteeing the corrupted value never matches gold under
// match_field. Deterministic for a fixed seed, independent of sample order.
// Perturbation styles: digit substitution, character drop, common-name swap.
std::map<std::string, FieldValues> synth_predictions(const Manifest& manifest, double error_rate,
                                                     std::uint64_t seed);

}  // namespace formsight
