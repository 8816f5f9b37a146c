// bqslab: batch experiment runner for the bounded quantum-storage protocols.
//
//   bqslab run            seeded protocol trials or targeted bound sweeps
//   bqslab verify-bounds  the full verification suite (or targeted checks)
//
// Exit codes: 0 success, 2 invalid configuration, 3 failed bound.

#include <CLI11.hpp>
#include <iostream>

#include "bqs/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bounded quantum-storage protocol laboratory"};
    // Config files use a [run] or [verify-bounds] section; command-line flags
    // override file values: bqslab --config exp.ini run
    app.set_config("--config", "", "read options from an INI/TOML file");
    app.require_subcommand(1);

    bqs::ExperimentConfig run_cfg;
    auto* run = app.add_subcommand("run", "run protocol trials or a targeted check");
    run->add_option("--protocol", run_cfg.protocol,
                    "qot|epr_qot|bb84_qot|bb84_epr_qot|comm|epr_comm|comm_prime");
    run->add_option("--check", run_cfg.check, "uncertainty|pa|binding|privacy|thresholds");
    run->add_option("--n", run_cfg.n, "string length / qubit count");
    run->add_option("--n-list", run_cfg.n_list, "sweep over several n values");
    run->add_option("--gamma", run_cfg.gamma, "adversary memory fraction");
    run->add_option("--phi", run_cfg.phi, "channel flip probability");
    run->add_option("--eta", run_cfg.eta, "multi-copy emission probability");
    run->add_option("--epsilon", run_cfg.epsilon, "slack parameter");
    run->add_option("--code", run_cfg.code, "trivial|hamming7|rep3|rep5|rep7|auto");
    run->add_option("--memory", run_cfg.memory, "bounded|erasure");
    run->add_option("--strategy", run_cfg.strategy,
                    "honest | store_subset:q=K[,basis=+|x] | bell_xor | erasure:p=P | "
                    "measure_all:B | bounded:q=K | unbounded");
    run->add_option("--trials", run_cfg.trials, "number of protocol executions");
    run->add_option("--samples", run_cfg.samples, "states per sweep (checks)");
    run->add_option("--seed", run_cfg.seed, "master seed");
    run->add_flag("--fixed-xor", run_cfg.fixed_xor, "QOT variant with a fixed linear mask");
    run->add_option("--out", run_cfg.out_dir, "output directory for report files");
    run->add_option("--format", run_cfg.format, "json|csv");
    run->add_flag("--transcripts", run_cfg.dump_transcripts, "dump the first 20 transcripts");

    bqs::VerifyConfig verify_cfg;
    auto* verify = app.add_subcommand("verify-bounds", "run the bound-verification suite");
    verify->add_option("--seed", verify_cfg.seed, "master seed");
    verify->add_option("--gamma", verify_cfg.gamma, "targeted: check gamma against the threshold");
    verify->add_option("--phi", verify_cfg.phi, "targeted: threshold at this phi");
    verify->add_option("--eta", verify_cfg.eta, "targeted: threshold at this eta");
    verify->add_option("--protocol", verify_cfg.protocol, "targeted: protocol for the check");
    verify->add_option("--out", verify_cfg.out_dir, "output directory for report files");
    verify->add_option("--format", verify_cfg.format, "json|csv");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return bqs::run_experiment(run_cfg, std::cout);
    return bqs::verify_bounds(verify_cfg, std::cout);
}
