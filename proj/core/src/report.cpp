#include "gitseg/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gitseg/error.hpp"

namespace gitseg {

namespace {

void write_row(std::ostream& out, const std::string& case_id, const std::string& label, double dice_value,
               const std::optional<double>& hd, double hd_score_value, double composite_value) {
    out << case_id << ',' << label << ',' << format_real(dice_value) << ','
        << (hd ? format_real(*hd) : std::string{}) << ',' << format_real(hd_score_value) << ','
        << format_real(composite_value) << '\n';
}

double mean_of(std::span<const CaseScore> cases, double CaseReport::*field) {
    if (cases.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : cases) sum += c.report.*field;
    return sum / static_cast<double>(cases.size());
}

double parse_real(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("score report line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

std::string format_real(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double overall_composite(std::span<const CaseScore> cases) { return mean_of(cases, &CaseReport::mean_composite); }

void write_score_report(std::ostream& out, std::span<const CaseScore> cases, const ClassLabels& labels) {
    out << kReportHeader << '\n';
    for (const auto& c : cases) {
        for (auto cls : kOrganClasses) {
            const auto& row = c.report.classes[index_of(cls)];
            write_row(out, c.case_id, labels.label(cls), row.dice, row.hausdorff_mm, row.hd_score, row.composite);
        }
    }
    for (const auto& c : cases) {
        write_row(out, c.case_id, kMeanLabel, c.report.mean_dice, std::nullopt, c.report.mean_hd_score,
                  c.report.mean_composite);
    }
    write_row(out, kOverallCase, kMeanLabel, mean_of(cases, &CaseReport::mean_dice), std::nullopt,
              mean_of(cases, &CaseReport::mean_hd_score), overall_composite(cases));
}

void write_score_report(const std::string& path, std::span<const CaseScore> cases, const ClassLabels& labels) {
    std::ostringstream buf;
    write_score_report(buf, cases, labels);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << buf.str();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ReportRow> read_score_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open score report '" + path + "'");
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kReportHeader) {
        throw ParseError("score report '" + path + "': bad header");
    }
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            f.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        f.push_back(rest);
        if (f.size() != 6) {
            throw ParseError("score report line " + std::to_string(line_no) + ": expected 6 fields");
        }
        ReportRow r;
        r.case_id = std::string(f[0]);
        r.class_label = std::string(f[1]);
        r.dice = parse_real(f[2], line_no);
        if (!f[3].empty()) r.hausdorff_mm = parse_real(f[3], line_no);
        r.hd_score = parse_real(f[4], line_no);
        r.composite = parse_real(f[5], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace gitseg
