#include <filesystem>
#include <sstream>

#include "botmut/analysis.hpp"
#include "botmut/error.hpp"

namespace botmut {

namespace {

std::string percent_of(const MutationCounts& counts) {
    int denominator = counts.generated - counts.broken - counts.equivalent;
    if (denominator <= 0) return "n/a";
    return std::to_string(score(counts)) + "%";
}

std::string pad(const std::string& text, size_t width) {
    std::string out = text;
    while (out.size() < width) out.push_back(' ');
    return out;
}

}  // namespace

// B / K / E / G / %K per operator category and in total, one row per run.
std::string render_table(const MutationReport& report) {
    const MutationCounts chatbot = report.counts_for("ChatbotStructure");
    const MutationCounts flow = report.counts_for("Flow");
    const MutationCounts total = report.counts_total();

    std::string name = std::filesystem::path(report.project).filename().string();
    if (name.empty()) name = report.project;
    const size_t name_width = std::max<size_t>(name.size(), 7) + 2;
    const size_t col = 6;
    const size_t group_width = 5 * col;

    auto group_cells = [&](const MutationCounts& c) {
        std::string out;
        out += pad(std::to_string(c.broken), col);
        out += pad(std::to_string(c.killed), col);
        out += pad(std::to_string(c.equivalent), col);
        out += pad(std::to_string(c.generated), col);
        out += pad(percent_of(c), col);
        return out;
    };

    std::ostringstream out;
    out << pad("", name_width) << "| " << pad("Chatbot", group_width + 1) << "| "
        << pad("Flow", group_width + 1) << "| " << pad("Total", group_width + 1) << "\n";
    std::string header_cells;
    header_cells += pad("B", col) + pad("K", col) + pad("E", col) + pad("G", col) + pad("%K", col);
    out << pad("Chatbot", name_width) << "| " << header_cells << " | " << header_cells << " | "
        << header_cells << "\n";
    out << std::string(name_width + 3 * (group_width + 3), '-') << "\n";
    out << pad(name, name_width) << "| " << group_cells(chatbot) << " | " << group_cells(flow) << " | "
        << group_cells(total) << "\n";
    return out.str();
}

}  // namespace botmut
