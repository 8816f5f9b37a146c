#pragma once

// Batch experiment driver behind the CLI: seeded protocol runs with pluggable
// strategies, targeted bound sweeps, and the full verification suite.
// Deterministic given (config, seed); every output embeds both.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bqs/report.hpp"

namespace bqs {

struct ExperimentConfig {
    std::string protocol = "qot";  // qot|epr_qot|bb84_qot|comm|epr_comm|comm_prime
    std::string check;             // uncertainty|pa|binding|privacy|thresholds (overrides protocol)
    int n = 6;
    std::vector<int> n_list;       // optional sweep over several n values
    double gamma = 0.0;
    double phi = 0.0;
    double eta = 0.0;
    double epsilon = 0.05;
    std::string code = "auto";
    std::string strategy = "honest";
    std::string memory = "bounded";  // bounded|erasure (erasure: p = 1 - gamma)
    long trials = 1000;
    int samples = 500;
    std::uint64_t seed = 1;
    bool fixed_xor = false;  // QOT variant: mask with the fixed all-ones linear function
    std::string out_dir;     // empty: stdout only
    std::string format = "json";  // json|csv
    bool dump_transcripts = false;
};

// Exit status: 0 ok, 2 invalid config, 3 failed non-vacuous bound.
int run_experiment(const ExperimentConfig& cfg, std::ostream& out);

struct VerifyConfig {
    std::uint64_t seed = 1;
    double gamma = -1.0;    // >= 0: targeted hypothesis check
    double phi = -1.0;
    double eta = -1.0;
    std::string protocol;   // optional focus for the targeted check
    std::string out_dir;
    std::string format = "json";
};

int verify_bounds(const VerifyConfig& cfg, std::ostream& out);

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<BoundReport> details;
};

// The full verification suite; one entry per criterion.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, std::ostream* progress);

}  // namespace bqs
