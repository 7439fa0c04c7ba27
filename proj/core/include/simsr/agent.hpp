#pragma once

#include "simsr/encoder.hpp"
#include "simsr/env.hpp"
#include "simsr/mlp.hpp"
#include "simsr/rng.hpp"

#include <cstdint>

namespace simsr {

// Twin Q-networks (latent -> one value per action) with EMA targets.
struct CriticParams {
    Mlp q1;
    Mlp q2;
    Mlp q1_target;
    Mlp q2_target;
    double tau = 0.01;           // target <- (1-tau)*target + tau*online
    int target_update_freq = 2;  // updates between target refreshes
    long update_count = 0;

    static CriticParams make(int latent_dim, int hidden_dim, int n_actions, std::uint64_t seed,
                             double tau = 0.01, int target_update_freq = 2);
};

struct ActorParams {
    Mlp pi;  // latent -> action logits
    double alpha = 0.1;

    static ActorParams make(int latent_dim, int hidden_dim, int n_actions, std::uint64_t seed,
                            double alpha = 0.1);
};

enum class ActMode { sample, greedy };

// sample draws from softmax(logits); greedy takes the argmax with
// lowest-index tie-breaking. rng may be null in greedy mode.
int act(const ActorParams& actor, const Vector& latent, ActMode mode, Rng* rng);

Matrix softmax_rows(const Matrix& logits);

struct CriticUpdateResult {
    double q1_loss = 0.0;
    double q2_loss = 0.0;
    double mean_q = 0.0;  // mean online Q over taken actions, before update
};

// Soft Bellman update: y = r + gamma * E_{a'~pi}[min(Q1hat, Q2hat)(z', a')
// - alpha log pi(a'|z')], next latents from the momentum encoder, Huber
// loss per head. Critic gradients flow into the online encoder when
// update_encoder is set. Bootstraps through time-limit truncation (the
// underlying MDP is infinite-horizon, matching the tabular value oracle).
CriticUpdateResult critic_update(CriticParams& critic, const ActorParams& actor,
                                 EncoderPair& encoder, const Batch& batch, double gamma, double lr,
                                 bool update_encoder);

struct ActorUpdateResult {
    double loss = 0.0;
    double entropy = 0.0;  // mean policy entropy before the update
};

// Minimizes E_z E_{a~pi}[alpha log pi(a|z) - min(Q1, Q2)(z, a)] with the
// expectation over actions exact. The encoder is read-only here.
ActorUpdateResult actor_update(ActorParams& actor, const CriticParams& critic,
                               const EncoderParams& encoder, const Batch& batch, double lr);

void critic_target_ema(CriticParams& critic);

}  // namespace simsr
