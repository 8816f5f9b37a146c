#include "bqs/report.hpp"

#include <json.hpp>
#include <sstream>

namespace bqs {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Vacuous: return "vacuous";
        case CheckStatus::Hypothesis: return "hypothesis-violated";
    }
    return "?";
}

BoundReport exact_report(std::string name, double lhs, double rhs, double tol, double trivial_rhs) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.method = "exact";
    if (lhs > rhs + tol)
        r.status = CheckStatus::Fail;
    else
        r.status = rhs >= trivial_rhs ? CheckStatus::Vacuous : CheckStatus::Pass;
    return r;
}

BoundReport mc_report(std::string name, double lhs, double rhs, long trials, double sigma,
                      std::uint64_t seed, double trivial_rhs) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.method = "monte-carlo";
    r.trials = trials;
    r.sigma = sigma;
    r.seed = seed;
    if (lhs > rhs + 4.0 * sigma)
        r.status = CheckStatus::Fail;
    else
        r.status = rhs >= trivial_rhs ? CheckStatus::Vacuous : CheckStatus::Pass;
    return r;
}

namespace {

nlohmann::json report_json(const BoundReport& r) {
    return nlohmann::json{{"name", r.name},     {"lhs", r.lhs},
                          {"rhs", r.rhs},       {"margin", r.margin},
                          {"pass", r.passed()}, {"status", to_string(r.status)},
                          {"method", r.method}, {"trials", r.trials},
                          {"sigma", r.sigma},   {"seed", r.seed},
                          {"note", r.note}};
}

}  // namespace

std::string reports_to_json(const std::vector<BoundReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return arr.dump(2);
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    os << "name,lhs,rhs,margin,pass,status,method,trials,sigma,seed,note\n";
    os.precision(17);
    for (const auto& r : reports) {
        std::string note = r.note;
        for (auto& c : note)
            if (c == ',' || c == '\n') c = ';';
        os << r.name << ',' << r.lhs << ',' << r.rhs << ',' << r.margin << ','
           << (r.passed() ? "true" : "false") << ',' << to_string(r.status) << ',' << r.method
           << ',' << r.trials << ',' << r.sigma << ',' << r.seed << ',' << note << '\n';
    }
    return os.str();
}

}  // namespace bqs
