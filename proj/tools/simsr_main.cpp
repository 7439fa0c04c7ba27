#include "simsr/config.hpp"
#include "simsr/errors.hpp"
#include "simsr/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

// Exit codes: 0 success, 2 validation error, 3 convergence failure,
// 4 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;  // -1 keeps the config's seed
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the JSON run config")->required();
    cmd->add_option("--out", args.out_dir, "Output directory (created if missing)")->required();
    cmd->add_option("--seed", args.seed, "Seed override (takes precedence over the config)");
}

template <typename Config, typename Parse, typename Run>
int dispatch(const CommonArgs& args, Parse parse, Run run) {
    try {
        Config cfg = parse(simsr::read_text_file(args.config_path));
        if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
        run(cfg, args.out_dir);
        return kExitOk;
    } catch (const simsr::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << " (residual " << e.residual
                  << " after " << e.iterations << " iterations)\n";
        return kExitConvergence;
    } catch (const simsr::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const simsr::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SimSR behavioral metrics: exact solvers and representation learning"};
    app.require_subcommand(1);

    CommonArgs solve_args, train_args, eval_args, transfer_args;
    CLI::App* solve = app.add_subcommand(
        "solve-metric", "Solve a behavioral-metric fixed point on a finite MDP");
    add_common(solve, solve_args);
    CLI::App* train = app.add_subcommand("train", "Run the representation/agent training loop");
    add_common(train, train_args);
    CLI::App* eval = app.add_subcommand(
        "eval-metric-quality", "Compare a checkpoint's distances against the exact fixed point");
    add_common(eval, eval_args);
    CLI::App* transfer = app.add_subcommand(
        "transfer", "Train frozen-encoder and from-scratch agents on a target env");
    add_common(transfer, transfer_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (solve->parsed())
        return dispatch<simsr::SolveMetricConfig>(solve_args, simsr::parse_solve_metric_config,
                                                  simsr::run_solve_metric);
    if (train->parsed())
        return dispatch<simsr::TrainCommandConfig>(train_args, simsr::parse_train_config,
                                                   simsr::run_train);
    if (eval->parsed())
        return dispatch<simsr::EvalCommandConfig>(eval_args, simsr::parse_eval_config,
                                                  simsr::run_eval_metric_quality);
    return dispatch<simsr::TransferCommandConfig>(transfer_args, simsr::parse_transfer_config,
                                                  simsr::run_transfer);
}
