#pragma once

#include "simsr/env.hpp"
#include "simsr/metric.hpp"
#include "simsr/simsr_loss.hpp"

#include <cstdint>
#include <string>

namespace simsr {

// MDP source for solve-metric: a gridworld, a seeded random MDP, or a file
// in the simsr-mdp text format.
struct MdpSpecConfig {
    std::string kind = "grid";
    GridSpec grid;
    int n_states = 6;
    int n_actions = 3;
    bool deterministic = false;
    double gamma_lo = 0.5;
    double gamma_hi = 0.95;
    std::string path;
};

struct SolveMetricConfig {
    MdpSpecConfig mdp;
    std::string policy = "uniform";  // uniform | optimal | random
    OperatorKind op = OperatorKind::IndependentCoupling;
    double tol = 1e-8;
    int max_iter = 0;
    std::uint64_t seed = 1;
};

struct AgentConfig {
    bool enabled = true;
    double alpha = 0.1;
    double critic_tau = 0.01;
    int critic_target_update_freq = 2;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    bool update_encoder_from_critic = true;
};

struct RunSection {
    long total_steps = 30000;
    long init_steps = 1000;
    long buffer_capacity = 100000;
    long eval_every = 1000;
    int eval_episodes = 10;
    long checkpoint_every = 0;  // 0 keeps only the final checkpoint
    bool train_encoder = true;
    bool train_dynamics = true;
    std::string behavior = "agent";  // agent | uniform
    bool freeze_encoder = false;
    std::string load_encoder;  // checkpoint path; empty means fresh init
};

struct TrainCommandConfig {
    GridSpec env;
    TrainConfig train;
    AgentConfig agent;
    RunSection run;
    std::uint64_t seed = 1;
};

struct EvalCommandConfig {
    GridSpec env;
    std::string checkpoint;
    std::string policy = "uniform";
    OperatorKind op = OperatorKind::IndependentCoupling;
    double tol = 1e-8;
    std::uint64_t seed = 1;
};

struct TransferCommandConfig {
    GridSpec env;
    std::string source_checkpoint;
    TrainConfig train;
    AgentConfig agent;
    RunSection run;
    std::uint64_t seed = 1;
};

// Parsers are strict: unknown keys anywhere raise ValidationError naming
// the key, so typos never silently fall back to defaults. Each parser also
// reserializes to the canonical echo written into run directories.
SolveMetricConfig parse_solve_metric_config(const std::string& json_text);
TrainCommandConfig parse_train_config(const std::string& json_text);
EvalCommandConfig parse_eval_config(const std::string& json_text);
TransferCommandConfig parse_transfer_config(const std::string& json_text);

std::string echo_config(const SolveMetricConfig& c);
std::string echo_config(const TrainCommandConfig& c);
std::string echo_config(const EvalCommandConfig& c);
std::string echo_config(const TransferCommandConfig& c);

std::string read_text_file(const std::string& path);                      // throws IoError
void write_text_file(const std::string& path, const std::string& text);   // throws IoError

}  // namespace simsr
