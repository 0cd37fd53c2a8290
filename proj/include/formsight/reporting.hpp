#pragma once

#include "formsight/evaluation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace formsight {

enum class TableFormat { markdown, csv };

// Two-decimal half-up rendering computed with integer arithmetic on the exact
// fraction, so 0.885714... -> "0.89" and 2/3 -> "0.67" without float drift.
std::string format_fraction_2dp(const Fraction& value);

// Accuracy table with an Average column and a flagged Average row. Rows keep
// schema order; every cell is rounded only here, never upstream.
std::string render_table(const AccuracyTable& table, TableFormat format);

// Scenario x variant heatmap as deterministic SVG: one colored cell per grid
// entry with the value overlaid, single-hue linear color scale over [0, 1].
std::string render_heatmap(const std::vector<HeatmapCell>& grid);

// Everything one evaluation run produces. Tables and heatmap are derived from
// `matrix`; run_meta echoes configuration and carries the only
// non-deterministic field (the timestamp).
struct RunReport {
    AccuracyTable by_scenario;
    AccuracyTable by_variant;
    std::vector<HeatmapCell> heatmap;
    ScoreMatrix matrix;
    nlohmann::ordered_json run_meta;
};

RunReport build_report(const ScoreMatrix& matrix, nlohmann::ordered_json run_meta);

nlohmann::ordered_json report_to_json(const RunReport& report);

// Writes results.json, by_scenario.{md,csv}, by_format.{md,csv}, and
// heatmap.svg into `directory` (each write-then-rename). Returns the written
// paths. Identical inputs produce identical bytes for everything except
// run_meta's timestamp inside results.json.
std::vector<std::filesystem::path> export_report(const RunReport& report,
                                                 const std::filesystem::path& directory);

}  // namespace formsight
