#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcf::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double budget_seconds = 0.0;
    double seconds = 0.0;                 // wall time, kept out of the report
    std::vector<std::string> details;     // one line per sub-check
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
};

struct Criterion {
    int id;
    const char* name;   // subset alias
    const char* title;
    double budget_seconds;
};

const std::vector<Criterion>& criteria();

/// Accepts ids ("5") or aliases ("evolution"); comma separated lists.
/// Throws std::invalid_argument for unknown entries. Empty selects all.
std::vector<int> parse_subset(const std::string& text);

CriterionResult run_criterion(int id);

struct VerifyOutcome {
    std::vector<CriterionResult> results;
    nlohmann::ordered_json report;  // deterministic: no wall-clock data
    bool all_passed = false;
};

/// Runs the selected criteria, printing one verdict line per criterion to
/// `log` as each finishes. Criterion 10 re-runs the other selected criteria
/// (all of 1-9 when none are selected) and compares serialized reports.
VerifyOutcome run_verify(const std::vector<int>& subset, std::ostream& log);

std::string verdict_line(const CriterionResult& r);

}  // namespace mcf::acceptance
