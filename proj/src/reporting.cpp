#include "formsight/reporting.hpp"

#include "formsight/errors.hpp"
#include "formsight/util.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace formsight {

namespace {

using nlohmann::ordered_json;

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_markdown(const AccuracyTable& table) {
    std::ostringstream out;
    out << "| Field |";
    for (const auto& group : table.groups) {
        out << " " << group << " |";
    }
    out << " Average |\n";
    out << "| --- |";
    for (std::size_t g = 0; g <= table.groups.size(); ++g) {
        out << " --- |";
    }
    out << "\n";
    for (std::size_t f = 0; f < table.fields.size(); ++f) {
        out << "| " << table.fields[f] << " |";
        for (const auto& cell : table.cells[f]) {
            out << " " << format_fraction_2dp(cell) << " |";
        }
        out << " " << format_fraction_2dp(table.field_avg[f]) << " |\n";
    }
    out << "| **Average** |";
    for (const auto& avg : table.group_avg) {
        out << " " << format_fraction_2dp(avg) << " |";
    }
    out << " " << format_fraction_2dp(table.overall) << " |\n";
    return out.str();
}

std::string render_csv(const AccuracyTable& table) {
    std::ostringstream out;
    out << "Field";
    for (const auto& group : table.groups) {
        out << "," << csv_quote(group);
    }
    out << ",Average\r\n";
    for (std::size_t f = 0; f < table.fields.size(); ++f) {
        out << csv_quote(table.fields[f]);
        for (const auto& cell : table.cells[f]) {
            out << "," << format_fraction_2dp(cell);
        }
        out << "," << format_fraction_2dp(table.field_avg[f]) << "\r\n";
    }
    out << "Average";
    for (const auto& avg : table.group_avg) {
        out << "," << format_fraction_2dp(avg);
    }
    out << "," << format_fraction_2dp(table.overall) << "\r\n";
    return out.str();
}

// Linear single-hue ramp from near-white to dark blue.
std::string ramp_color(const Fraction& value) {
    constexpr int lo[3] = {247, 251, 255};
    constexpr int hi[3] = {8, 48, 107};
    double v = std::clamp(value.to_double(), 0.0, 1.0);
    char buf[8];
    int r = static_cast<int>(lo[0] + (hi[0] - lo[0]) * v + 0.5);
    int g = static_cast<int>(lo[1] + (hi[1] - lo[1]) * v + 0.5);
    int b = static_cast<int>(lo[2] + (hi[2] - lo[2]) * v + 0.5);
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

ordered_json table_to_json(const AccuracyTable& table) {
    ordered_json doc;
    doc["fields"] = table.fields;
    doc["groups"] = table.groups;
    doc["cells"] = ordered_json::array();
    for (const auto& row : table.cells) {
        ordered_json cells_row = ordered_json::array();
        for (const auto& cell : row) {
            cells_row.push_back(cell.to_double());
        }
        doc["cells"].push_back(std::move(cells_row));
    }
    doc["field_averages"] = ordered_json::array();
    for (const auto& avg : table.field_avg) {
        doc["field_averages"].push_back(avg.to_double());
    }
    doc["group_averages"] = ordered_json::array();
    for (const auto& avg : table.group_avg) {
        doc["group_averages"].push_back(avg.to_double());
    }
    doc["overall"] = table.overall.to_double();
    return doc;
}

}  // namespace

std::string format_fraction_2dp(const Fraction& value) {
    if (value.num() < 0) {
        throw std::invalid_argument("negative accuracy value");
    }
    // floor(100*num/den + 1/2) without leaving integer arithmetic
    __int128 hundredths = (static_cast<__int128>(value.num()) * 200 + value.den()) /
                          (static_cast<__int128>(value.den()) * 2);
    auto whole = static_cast<long long>(hundredths / 100);
    auto frac = static_cast<int>(hundredths % 100);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%02d", whole, frac);
    return buf;
}

std::string render_table(const AccuracyTable& table, TableFormat format) {
    return format == TableFormat::markdown ? render_markdown(table) : render_csv(table);
}

std::string render_heatmap(const std::vector<HeatmapCell>& grid) {
    if (grid.empty()) {
        throw ConfigError("cannot render an empty heatmap");
    }
    std::vector<std::string> scenarios;
    std::vector<std::string> variants;
    for (const auto& cell : grid) {
        if (std::find(scenarios.begin(), scenarios.end(), cell.scenario_id) == scenarios.end()) {
            scenarios.push_back(cell.scenario_id);
        }
        if (std::find(variants.begin(), variants.end(), cell.variant) == variants.end()) {
            variants.push_back(cell.variant);
        }
    }

    constexpr int cell_w = 96;
    constexpr int cell_h = 52;
    constexpr int left = 80;
    constexpr int top = 44;
    constexpr int pad = 12;
    const int width = left + cell_w * static_cast<int>(variants.size()) + pad;
    const int height = top + cell_h * static_cast<int>(scenarios.size()) + pad;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t v = 0; v < variants.size(); ++v) {
        int x = left + static_cast<int>(v) * cell_w + cell_w / 2;
        svg << "  <text x=\"" << x << "\" y=\"" << top - 14
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << xml_escape(variants[v]) << "</text>\n";
    }
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        int y = top + static_cast<int>(s) * cell_h + cell_h / 2 + 5;
        svg << "  <text x=\"" << left - 10 << "\" y=\"" << y
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">"
            << xml_escape(scenarios[s]) << "</text>\n";
    }
    for (const auto& cell : grid) {
        auto s = static_cast<int>(std::find(scenarios.begin(), scenarios.end(), cell.scenario_id) -
                                  scenarios.begin());
        auto v = static_cast<int>(std::find(variants.begin(), variants.end(), cell.variant) -
                                  variants.begin());
        int x = left + v * cell_w;
        int y = top + s * cell_h;
        svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
            << cell_h << "\" fill=\"" << ramp_color(cell.accuracy)
            << "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
        const char* text_color = cell.accuracy.to_double() >= 0.55 ? "#ffffff" : "#1a1a1a";
        svg << "  <text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 5
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\""
            << text_color << "\">" << format_fraction_2dp(cell.accuracy) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

RunReport build_report(const ScoreMatrix& matrix, ordered_json run_meta) {
    RunReport report;
    report.by_scenario = aggregate_by(matrix, GroupAxis::scenario);
    report.by_variant = aggregate_by(matrix, GroupAxis::variant);
    report.heatmap = heatmap_grid(matrix);
    report.matrix = matrix;
    report.run_meta = std::move(run_meta);
    return report;
}

ordered_json report_to_json(const RunReport& report) {
    ordered_json doc;
    doc["run_meta"] = report.run_meta;
    doc["by_scenario"] = table_to_json(report.by_scenario);
    doc["by_format"] = table_to_json(report.by_variant);
    doc["heatmap"] = ordered_json::array();
    for (const auto& cell : report.heatmap) {
        doc["heatmap"].push_back(ordered_json{{"scenario", cell.scenario_id},
                                              {"variant", cell.variant},
                                              {"accuracy", cell.accuracy.to_double()}});
    }
    doc["per_sample"] = ordered_json::array();
    for (const auto& cell : report.matrix.cells) {
        ordered_json record{{"scenario", cell.scenario_id}, {"variant", cell.variant},
                            {"field", cell.field},         {"gold", cell.gold},
                            {"predicted", cell.predicted}, {"correct", cell.correct}};
        if (!cell.error.empty()) {
            record["error"] = cell.error;
        }
        doc["per_sample"].push_back(std::move(record));
    }
    return doc;
}

std::vector<std::filesystem::path> export_report(const RunReport& report,
                                                 const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw IoError("cannot create output directory " + directory.string() + ": " +
                      ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto emit = [&](const char* name, const std::string& content) {
        auto path = directory / name;
        util::write_file_atomic(path, content);
        written.push_back(path);
    };
    emit("results.json", report_to_json(report).dump(2) + "\n");
    emit("by_scenario.md", render_table(report.by_scenario, TableFormat::markdown));
    emit("by_scenario.csv", render_table(report.by_scenario, TableFormat::csv));
    emit("by_format.md", render_table(report.by_variant, TableFormat::markdown));
    emit("by_format.csv", render_table(report.by_variant, TableFormat::csv));
    emit("heatmap.svg", render_heatmap(report.heatmap));
    return written;
}

}  // namespace formsight
