#pragma once

#include "simsr/dynamics.hpp"
#include "simsr/encoder.hpp"
#include "simsr/env.hpp"
#include "simsr/rng.hpp"

#include <string>

namespace simsr {

// How the next-latent half of the metric target is produced: the sampled
// next observation from the buffer, or a draw from the latent dynamics
// ensemble applied to target-encoded current latents.
enum class TargetVariant { ObservationSampling, LatentDynamics };
enum class LossKind { mse, huber };

const char* to_string(TargetVariant v);
TargetVariant target_variant_from_string(const std::string& name);
const char* to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& name);

struct TrainConfig {
    double gamma = 0.99;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double momentum = 0.95;  // encoder EMA coefficient m; tau = 1 - m
    LossKind loss_kind = LossKind::huber;
    double huber_delta = 1.0;
    TargetVariant target_variant = TargetVariant::ObservationSampling;
    int ensemble_k = 5;
    int hidden_dim = 64;
    int latent_dim = 50;

    void validate() const;  // throws ValidationError
};

// Target(i, j) = |R_i - R_j| + gamma * cos_dist(t_i, t_j), built entirely
// from the target encoder (no gradient flows out of it). LatentDynamics
// samples one ensemble head per batch and uses the raw (unnormalized)
// Gaussian draws, normalizing only inside the cosine.
Matrix simsr_target(const Batch& batch, const EncoderPair& pair, const TrainConfig& config,
                    const DynamicsEnsemble* ensemble, Rng& rng);

struct SimsrLossResult {
    double loss = 0.0;
    Matrix dZ;  // gradient w.r.t. the online latents
};

// Loss between the online pairwise distance matrix D = 1 - Z Z^T and the
// target: mean over all n^2 entries of squared error (mse) or per-entry
// Huber (huber). D is used unclamped so the gradient is exact.
SimsrLossResult simsr_loss(const Matrix& Z, const Matrix& target, LossKind kind,
                           double huber_delta = 1.0);

struct StepMetrics {
    double simsr_loss = 0.0;
    double dynamics_loss = 0.0;
    double mean_embedding_norm = 0.0;  // pre-normalization; collapse indicator
};

// One representation update: encoder gradient step on the SimSR loss,
// dynamics NLL step (when an ensemble is supplied), then the encoder EMA.
// Metrics report losses before the step.
StepMetrics train_step(const Batch& batch, EncoderPair& pair, DynamicsEnsemble* ensemble,
                       const TrainConfig& config, Rng& rng);

}  // namespace simsr
