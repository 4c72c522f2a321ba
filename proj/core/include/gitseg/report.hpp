#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gitseg/metrics.hpp"

namespace gitseg {

struct CaseScore {
    std::string case_id;  // "{case}_day{d}"
    CaseReport report;
};

struct ReportRow {
    std::string case_id;
    std::string class_label;
    double dice = 0.0;
    std::optional<double> hausdorff_mm;
    double hd_score = 0.0;
    double composite = 0.0;
};

inline constexpr const char* kReportHeader = "case_id,class,dice,hausdorff_mm,hd_score,composite";
inline constexpr const char* kMeanLabel = "mean";
inline constexpr const char* kOverallCase = "overall";

// Layout: one row per (case, class) in input order, then one "{case},mean"
// row per case, then a final "overall,mean" row averaging the case means.
// Numbers use the shortest round-trip decimal form; hausdorff_mm is empty
// when undefined.
void write_score_report(std::ostream& out, std::span<const CaseScore> cases, const ClassLabels& labels);
void write_score_report(const std::string& path, std::span<const CaseScore> cases, const ClassLabels& labels);

/// Mean of the per-case mean composites (0 cases -> 0).
double overall_composite(std::span<const CaseScore> cases);

std::vector<ReportRow> read_score_report(const std::string& path);

std::string format_real(double value);

}  // namespace gitseg
