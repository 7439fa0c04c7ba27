#pragma once

#include "simsr/agent.hpp"
#include "simsr/config.hpp"
#include "simsr/dynamics.hpp"
#include "simsr/encoder.hpp"
#include "simsr/env.hpp"
#include "simsr/metric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace simsr {

struct StepRow {
    long step = 0;
    double simsr_loss = 0.0;
    double dynamics_loss = 0.0;
    double mean_embedding_norm = 0.0;
    double metric_approx_error = 0.0;  // MAE vs the uniform-policy fixed point
    double q1_loss = 0.0;
    double q2_loss = 0.0;
    double actor_loss = 0.0;
    double actor_entropy = 0.0;
};

struct EpisodeRow {
    long episode = 0;
    double ret = 0.0;
    int length = 0;
    double mean_q = 0.0;
    double actor_entropy = 0.0;
};

struct EvalPoint {
    long step = 0;
    double mean_return = 0.0;
    double mean_discounted_return = 0.0;
};

struct TrainLoopResult {
    EncoderPair encoder;
    std::optional<DynamicsEnsemble> ensemble;
    std::optional<CriticParams> critic;
    std::optional<ActorParams> actor;
    std::vector<StepRow> steps;  // one row per step with updates
    std::vector<EpisodeRow> episodes;
    std::vector<EvalPoint> evals;
    DistanceMatrix exact_reference;  // uniform-policy fixed point of the env MDP
};

// Full training loop (collect, replay, representation update, agent
// update), shared by the train and transfer commands and reused in-process
// by the acceptance suite.
TrainLoopResult run_train_loop(const TrainCommandConfig& cfg);

void run_solve_metric(const SolveMetricConfig& cfg, const std::string& out_dir);
void run_train(const TrainCommandConfig& cfg, const std::string& out_dir);
void run_eval_metric_quality(const EvalCommandConfig& cfg, const std::string& out_dir);
void run_transfer(const TransferCommandConfig& cfg, const std::string& out_dir);

FiniteMDP build_mdp(const MdpSpecConfig& spec, std::uint64_t seed);
Policy build_policy(const std::string& name, const FiniteMDP& mdp, std::uint64_t seed);

// Observations of every state at one distractor phase (scrolling advances
// t, static noise advances the episode, none ignores the phase).
Matrix render_states(const ObservationEmitter& emitter, int phase);
int distractor_phase_count(const ObservationEmitter& emitter);

struct MetricQualityReport {
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    double spearman = 0.0;
    double invariance_gap = 0.0;
};

// Compares learned cos distances (phase-0 renderings) against an exact
// distance matrix over state pairs i < j, and measures the worst cos
// distance between encodings of the same state across distractor phases.
MetricQualityReport metric_quality(const EncoderParams& encoder, const ObservationEmitter& emitter,
                                   const DistanceMatrix& exact);

}  // namespace simsr
