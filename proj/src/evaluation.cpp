#include "formsight/evaluation.hpp"

#include "formsight/errors.hpp"
#include "formsight/util.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

namespace formsight {

namespace {

std::vector<std::string> sorted_unique_scenarios(const Manifest& manifest) {
    std::set<std::string> set;
    for (const auto& s : manifest.samples) {
        set.insert(s.scenario_id);
    }
    return {set.begin(), set.end()};
}

std::vector<std::string> ordered_variants(const Manifest& manifest) {
    std::set<std::string> set;
    for (const auto& s : manifest.samples) {
        set.insert(s.variant);
    }
    std::vector<std::string> out(set.begin(), set.end());
    std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
        auto ra = variant_rank(a);
        auto rb = variant_rank(b);
        return ra != rb ? ra < rb : a < b;
    });
    return out;
}

// Deterministic 64-bit stream per (seed, sample, field); independent of the
// order samples appear in the manifest.
std::mt19937_64 field_rng(std::uint64_t seed, const std::string& sample_id,
                          const std::string& field) {
    std::string tag = std::to_string(seed) + '\x1f' + sample_id + '\x1f' + field;
    // FNV-1a fold of the digest into a 64-bit engine seed
    std::uint64_t h = 1469598103934665603ull;
    for (char c : util::sha256_hex(tag)) {
        h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    }
    return std::mt19937_64(h);
}

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

const std::vector<std::string>& common_names() {
    static const std::vector<std::string> names = {
        "Jane", "Wayne", "John", "Robert", "Michelle", "Mary",
        "David", "Sarah", "Smith", "Johnson", "Williams", "Brown"};
    return names;
}

std::string substitute_digit(const std::string& value, std::mt19937_64& rng) {
    std::vector<std::size_t> digit_positions;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(value[i]))) {
            digit_positions.push_back(i);
        }
    }
    if (digit_positions.empty()) {
        return value;
    }
    std::string out = value;
    std::size_t pos = digit_positions[rng() % digit_positions.size()];
    char original = out[pos];
    char replacement = static_cast<char>('0' + rng() % 10);
    if (replacement == original) {
        replacement = static_cast<char>('0' + (original - '0' + 1) % 10);
    }
    out[pos] = replacement;
    return out;
}

std::string drop_character(const std::string& value, std::mt19937_64& rng) {
    if (value.size() < 2) {
        return value;
    }
    std::string out = value;
    out.erase(rng() % out.size(), 1);
    return out;
}

std::string swap_name(const std::string& value, std::mt19937_64& rng) {
    const auto& names = common_names();
    for (std::size_t attempt = 0; attempt < names.size(); ++attempt) {
        const std::string& candidate = names[rng() % names.size()];
        if (!match_field(value, candidate)) {
            return candidate;
        }
    }
    return value;
}

std::string corrupt_value(const std::string& gold, std::mt19937_64& rng) {
    bool has_digit = std::any_of(gold.begin(), gold.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::string candidate;
        switch (rng() % 3) {
            case 0: candidate = has_digit ? substitute_digit(gold, rng) : swap_name(gold, rng); break;
            case 1: candidate = drop_character(gold, rng); break;
            default: candidate = swap_name(gold, rng); break;
        }
        if (!match_field(gold, candidate)) {
            return candidate;
        }
    }
    // appending a letter can never normalize back to gold
    return util::trim(gold) + "x";
}

}  // namespace

std::string normalize(std::string_view value) {
    return util::ascii_lower(util::trim(value));
}

bool match_field(std::string_view gold, std::string_view predicted) {
    return normalize(gold) == normalize(predicted);
}

Fraction ScoreMatrix::overall() const {
    if (cells.empty()) {
        return Fraction();
    }
    std::int64_t correct = 0;
    for (const auto& cell : cells) {
        correct += cell.correct ? 1 : 0;
    }
    return Fraction(correct, static_cast<std::int64_t>(cells.size()));
}

ScoreMatrix score_run(const Manifest& manifest,
                      const std::map<std::string, FieldValues>& predictions,
                      const std::map<std::string, std::string>& failures) {
    ScoreMatrix matrix;
    matrix.fields = manifest.schema.keys();
    matrix.scenarios = sorted_unique_scenarios(manifest);
    matrix.variants = ordered_variants(manifest);

    std::map<std::pair<std::string, std::string>, const Sample*> by_identity;
    for (const auto& sample : manifest.samples) {
        by_identity[{sample.scenario_id, sample.variant}] = &sample;
    }

    for (const auto& scenario : matrix.scenarios) {
        for (const auto& variant : matrix.variants) {
            auto it = by_identity.find({scenario, variant});
            if (it == by_identity.end()) {
                continue;  // unbalanced manifests leave holes in the grid
            }
            const Sample& sample = *it->second;
            const auto failure = failures.find(sample.id());
            const FieldValues* values = nullptr;
            if (failure == failures.end()) {
                auto pred = predictions.find(sample.id());
                if (pred == predictions.end()) {
                    throw CoverageError("no prediction for sample " + sample.id());
                }
                values = &pred->second;
                for (const auto& field : matrix.fields) {
                    if (!values->count(field)) {
                        throw CoverageError("prediction for sample " + sample.id() +
                                            " is missing key '" + field + "'");
                    }
                }
                for (const auto& [key, value] : *values) {
                    if (!manifest.schema.find(key)) {
                        throw CoverageError("prediction for sample " + sample.id() +
                                            " has unknown key '" + key + "'");
                    }
                }
            }
            for (const auto& field : matrix.fields) {
                ScoreCell cell;
                cell.scenario_id = scenario;
                cell.variant = variant;
                cell.field = field;
                cell.gold = sample.gold.at(field);
                if (values) {
                    cell.predicted = values->at(field);
                    cell.correct = match_field(cell.gold, cell.predicted);
                } else {
                    cell.correct = false;
                    cell.error = failure->second;
                }
                matrix.cells.push_back(std::move(cell));
            }
        }
    }
    return matrix;
}

AccuracyTable aggregate_by(const ScoreMatrix& matrix, GroupAxis axis) {
    if (matrix.cells.empty()) {
        throw ConfigError("cannot aggregate an empty score matrix");
    }
    AccuracyTable table;
    table.fields = matrix.fields;
    table.groups = axis == GroupAxis::scenario ? matrix.scenarios : matrix.variants;

    auto group_of = [axis](const ScoreCell& cell) -> const std::string& {
        return axis == GroupAxis::scenario ? cell.scenario_id : cell.variant;
    };

    table.cells.assign(table.fields.size(), std::vector<Fraction>(table.groups.size()));
    for (std::size_t f = 0; f < table.fields.size(); ++f) {
        for (std::size_t g = 0; g < table.groups.size(); ++g) {
            std::int64_t correct = 0;
            std::int64_t total = 0;
            for (const auto& cell : matrix.cells) {
                if (cell.field == table.fields[f] && group_of(cell) == table.groups[g]) {
                    ++total;
                    correct += cell.correct ? 1 : 0;
                }
            }
            if (total == 0) {
                throw ConfigError("empty group '" + table.groups[g] + "' for field '" +
                                  table.fields[f] + "'");
            }
            table.cells[f][g] = Fraction(correct, total);
        }
    }

    table.field_avg.reserve(table.fields.size());
    for (const auto& row : table.cells) {
        table.field_avg.push_back(Fraction::mean(row));
    }
    table.group_avg.assign(table.groups.size(), Fraction());
    for (std::size_t g = 0; g < table.groups.size(); ++g) {
        std::vector<Fraction> column;
        column.reserve(table.fields.size());
        for (std::size_t f = 0; f < table.fields.size(); ++f) {
            column.push_back(table.cells[f][g]);
        }
        table.group_avg[g] = Fraction::mean(column);
    }
    table.overall = Fraction::mean(table.field_avg);
    return table;
}

std::vector<HeatmapCell> heatmap_grid(const ScoreMatrix& matrix) {
    if (matrix.cells.empty()) {
        throw ConfigError("cannot build a heatmap from an empty score matrix");
    }
    std::vector<HeatmapCell> grid;
    for (const auto& scenario : matrix.scenarios) {
        for (const auto& variant : matrix.variants) {
            std::int64_t correct = 0;
            std::int64_t total = 0;
            for (const auto& cell : matrix.cells) {
                if (cell.scenario_id == scenario && cell.variant == variant) {
                    ++total;
                    correct += cell.correct ? 1 : 0;
                }
            }
            if (total > 0) {
                grid.push_back({scenario, variant, Fraction(correct, total)});
            }
        }
    }
    return grid;
}

std::map<std::string, FieldValues> synth_predictions(const Manifest& manifest, double error_rate,
                                                     std::uint64_t seed) {
    if (error_rate < 0.0 || error_rate > 1.0) {
        throw ConfigError("error_rate must lie in [0, 1]");
    }
    std::map<std::string, FieldValues> predictions;
    for (const auto& sample : manifest.samples) {
        FieldValues values;
        for (const auto& field : manifest.schema.keys()) {
            const std::string& gold = sample.gold.at(field);
            auto rng = field_rng(seed, sample.id(), field);
            if (unit_uniform(rng) < error_rate) {
                values[field] = corrupt_value(gold, rng);
            } else {
                values[field] = gold;
            }
        }
        predictions[sample.id()] = std::move(values);
    }
    return predictions;
}

}  // namespace formsight
