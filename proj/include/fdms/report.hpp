#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdms/dataio.hpp"
#include "fdms/simtasks.hpp"

namespace fdms {

namespace detail {

inline std::string shortest(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace detail

/// Columns: task, synergy_kind, synergy_name, n_s, trials, successes, rate.
inline std::string report_csv(const EvaluationReport& report)
{
    std::string out = "task,synergy_kind,synergy_name,n_s,trials,successes,rate\n";
    for (const auto& r : report.rows)
        out += report.task + "," + std::string(to_string(r.kind)) + "," + r.synergy_name + "," +
               std::to_string(r.n_s) + "," + std::to_string(r.trials) + "," + std::to_string(r.successes) + "," +
               detail::shortest(r.rate()) + "\n";
    return out;
}

inline nlohmann::json to_json(const EvaluationReport& report)
{
    nlohmann::json doc;
    doc["task"] = report.task;
    doc["seed"] = report.seed;
    doc["hash_algorithm"] = kHashAlgorithm;
    doc["grasp_source_hash"] = report.grasp_source_hash;
    doc["eval_data_hash"] = report.eval_data_hash;
    auto& rows = doc["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"synergy_kind", to_string(r.kind)},
                        {"synergy_name", r.synergy_name},
                        {"n_s", r.n_s},
                        {"trials", r.trials},
                        {"successes", r.successes},
                        {"rate", r.rate()}});
    return doc;
}

/// Line chart of success rate against component count, one series per
/// synergy kind.
inline std::string report_svg(const EvaluationReport& report)
{
    constexpr double width = 640, height = 400, left = 60, right = 160, top = 40, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    std::size_t max_ns = 1;
    for (const auto& r : report.rows)
        max_ns = std::max(max_ns, r.n_s);
    const auto x_of = [&](std::size_t n) {
        return max_ns == 1 ? left + plot_w / 2 : left + plot_w * static_cast<double>(n - 1) / static_cast<double>(max_ns - 1);
    };
    const auto y_of = [&](double rate) { return top + plot_h * (1.0 - rate); };

    std::map<SynergyKind, std::vector<const ReportRow*>> series;
    for (const auto& r : report.rows)
        series[r.kind].push_back(&r);
    const std::map<SynergyKind, const char*> colors = {
        {SynergyKind::Grasp, "#1f77b4"}, {SynergyKind::TaskSpecific, "#2ca02c"}, {SynergyKind::FDMS, "#d62728"}};

    using detail::fixed2;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(width) + "\" height=\"" +
                      fixed2(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed2(left) + "\" y=\"24\" font-size=\"14\">" + report.task +
           " task: success rate vs. principal components (seed " + std::to_string(report.seed) + ")</text>\n";
    svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + plot_h) + "\" x2=\"" + fixed2(left + plot_w) +
           "\" y2=\"" + fixed2(top + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) + "\" y2=\"" +
           fixed2(top + plot_h) + "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double rate = tick / 4.0;
        svg += "<text x=\"" + fixed2(left - 8) + "\" y=\"" + fixed2(y_of(rate) + 4) + "\" text-anchor=\"end\">" +
               fixed2(rate) + "</text>\n";
    }
    for (std::size_t n = 1; n <= max_ns; ++n)
        svg += "<text x=\"" + fixed2(x_of(n)) + "\" y=\"" + fixed2(top + plot_h + 18) +
               "\" text-anchor=\"middle\">" + std::to_string(n) + "</text>\n";
    svg += "<text x=\"" + fixed2(left + plot_w / 2) + "\" y=\"" + fixed2(height - 10) +
           "\" text-anchor=\"middle\">number of principal components</text>\n";

    double legend_y = top + 10;
    for (const auto& [kind, rows] : series) {
        const char* color = colors.at(kind);
        std::string points;
        for (const auto* r : rows) {
            if (!points.empty())
                points += " ";
            points += fixed2(x_of(r->n_s)) + "," + fixed2(y_of(r->rate()));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + points +
               "\"/>\n";
        for (const auto* r : rows)
            svg += "<circle cx=\"" + fixed2(x_of(r->n_s)) + "\" cy=\"" + fixed2(y_of(r->rate())) + "\" r=\"3\" fill=\"" +
                   color + "\"/>\n";
        svg += "<line x1=\"" + fixed2(left + plot_w + 15) + "\" y1=\"" + fixed2(legend_y) + "\" x2=\"" +
               fixed2(left + plot_w + 35) + "\" y2=\"" + fixed2(legend_y) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fixed2(left + plot_w + 40) + "\" y=\"" + fixed2(legend_y + 4) + "\">" +
               std::string(to_string(kind)) + " (" + rows.front()->synergy_name + ")</text>\n";
        legend_y += 20;
    }
    svg += "</svg>\n";
    return svg;
}

/// Writes `<task>_report.csv`, `<task>_report.svg` and `<task>_report.json`.
inline void write_report(const EvaluationReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_text_file(dir / (report.task + "_report.csv"), report_csv(report));
    write_text_file(dir / (report.task + "_report.svg"), report_svg(report));
    write_json_file(dir / (report.task + "_report.json"), to_json(report));
}

} // namespace fdms
