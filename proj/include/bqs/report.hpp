#pragma once

// Result record for one checked inequality: measured value vs theoretical
// bound, with the evaluation method and enough metadata to replay.

#include <cstdint>
#include <string>
#include <vector>

namespace bqs {

enum class CheckStatus {
    Pass,        // lhs <= rhs + tolerance (exact) or + 4 sigma (monte carlo)
    Fail,
    Vacuous,     // bound holds but is non-informative (rhs at or above the trivial value)
    Hypothesis,  // theorem hypothesis violated; reported, not counted as failure
};

const char* to_string(CheckStatus s);

struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    CheckStatus status = CheckStatus::Pass;
    std::string method;   // "exact" or "monte-carlo"
    long trials = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string note;

    bool passed() const { return status != CheckStatus::Fail; }
};

// Exact comparison at tolerance `tol`; flags Vacuous when rhs >= trivial_rhs.
BoundReport exact_report(std::string name, double lhs, double rhs, double tol = 1e-9,
                         double trivial_rhs = 1e300);

// Monte-Carlo comparison at lhs <= rhs + 4 sigma.
BoundReport mc_report(std::string name, double lhs, double rhs, long trials, double sigma,
                      std::uint64_t seed, double trivial_rhs = 1e300);

std::string reports_to_json(const std::vector<BoundReport>& reports);
std::string reports_to_csv(const std::vector<BoundReport>& reports);

}  // namespace bqs
