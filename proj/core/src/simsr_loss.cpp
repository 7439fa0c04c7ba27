#include "simsr/simsr_loss.hpp"

#include "simsr/errors.hpp"

#include <cmath>

namespace simsr {

const char* to_string(TargetVariant v) {
    switch (v) {
        case TargetVariant::ObservationSampling: return "observation_sampling";
        case TargetVariant::LatentDynamics: return "latent_dynamics";
    }
    throw Error("unknown TargetVariant");
}

TargetVariant target_variant_from_string(const std::string& name) {
    if (name == "observation_sampling") return TargetVariant::ObservationSampling;
    if (name == "latent_dynamics") return TargetVariant::LatentDynamics;
    throw ValidationError("unknown target variant '" + name +
                          "' (expected observation_sampling or latent_dynamics)");
}

const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::mse: return "mse";
        case LossKind::huber: return "huber";
    }
    throw Error("unknown LossKind");
}

LossKind loss_kind_from_string(const std::string& name) {
    if (name == "mse") return LossKind::mse;
    if (name == "huber") return LossKind::huber;
    throw ValidationError("unknown loss kind '" + name + "' (expected mse or huber)");
}

void TrainConfig::validate() const {
    if (gamma <= 0.0 || gamma >= 1.0) throw ValidationError("config: gamma must be in (0, 1)");
    if (batch_size < 2)
        throw ValidationError("config: batch_size must be >= 2 (pairwise distances need pairs)");
    if (learning_rate <= 0.0) throw ValidationError("config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ValidationError("config: momentum must be in [0, 1)");
    if (huber_delta <= 0.0) throw ValidationError("config: huber_delta must be positive");
    if (ensemble_k <= 0) throw ValidationError("config: ensemble_k must be positive");
    if (hidden_dim <= 0 || latent_dim <= 0)
        throw ValidationError("config: hidden_dim and latent_dim must be positive");
}

Matrix simsr_target(const Batch& batch, const EncoderPair& pair, const TrainConfig& config,
                    const DynamicsEnsemble* ensemble, Rng& rng) {
    const int n = batch.size();
    if (n < 1) throw ValidationError("simsr_target: empty batch");

    Matrix next_latents;
    switch (config.target_variant) {
        case TargetVariant::ObservationSampling:
            next_latents = encode_batch(pair.target, batch.next_obs);
            break;
        case TargetVariant::LatentDynamics: {
            if (!ensemble)
                throw ValidationError("simsr_target: LatentDynamics requires an ensemble");
            const Matrix current = encode_batch(pair.target, batch.obs);
            const int head = sample_head(*ensemble, rng);
            next_latents = sample_next_batch(*ensemble, head, current, batch.actions, rng);
            break;
        }
    }

    // Gaussian samples are off-sphere, so the cosine normalizes internally;
    // target-encoder outputs pass through that path unchanged (unit rows).
    const Matrix next_dist = cos_distance_matrix_general(next_latents, next_latents);
    Matrix target(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            target(i, j) =
                std::abs(batch.rewards(i) - batch.rewards(j)) + config.gamma * next_dist(i, j);
    return target;
}

SimsrLossResult simsr_loss(const Matrix& Z, const Matrix& target, LossKind kind,
                           double huber_delta) {
    const auto n = Z.rows();
    if (target.rows() != n || target.cols() != n)
        throw DimensionError("simsr_loss: target must be n x n for n latents");
    if (huber_delta <= 0.0) throw ValidationError("simsr_loss: huber_delta must be positive");

    // Unclamped distances keep the gradient exact; unit rows put the true
    // values in [0, 2] anyway.
    const Matrix D = Matrix::Ones(n, n) - Z * Z.transpose();
    const Matrix R = D - target;
    const double inv = 1.0 / static_cast<double>(n * n);

    SimsrLossResult result;
    Matrix G(n, n);  // dLoss/dD
    switch (kind) {
        case LossKind::mse:
            result.loss = inv * R.array().square().sum();
            G = (2.0 * inv) * R;
            break;
        case LossKind::huber: {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double r = R(i, j);
                    const double a = std::abs(r);
                    if (a <= huber_delta) {
                        acc += 0.5 * r * r;
                        G(i, j) = inv * r;
                    } else {
                        acc += huber_delta * (a - 0.5 * huber_delta);
                        G(i, j) = inv * (r > 0.0 ? huber_delta : -huber_delta);
                    }
                }
            }
            result.loss = inv * acc;
            break;
        }
    }
    // D = 1 - Z Z^T gives dLoss/dZ = -(G + G^T) Z.
    result.dZ = -(G + G.transpose()) * Z;
    return result;
}

StepMetrics train_step(const Batch& batch, EncoderPair& pair, DynamicsEnsemble* ensemble,
                       const TrainConfig& config, Rng& rng) {
    config.validate();
    if (batch.size() < 2) throw ValidationError("train_step: need at least 2 transitions");

    StepMetrics metrics;

    EncodeCache cache;
    const Matrix Z = encode_batch(pair.online, batch.obs, &cache);
    metrics.mean_embedding_norm = cache.norms.mean();

    const Matrix target = simsr_target(batch, pair, config, ensemble, rng);
    const SimsrLossResult loss = simsr_loss(Z, target, config.loss_kind, config.huber_delta);
    metrics.simsr_loss = loss.loss;

    // Dynamics inputs and NLL targets are detached encodings; the encoder
    // only learns through the SimSR loss and (elsewhere) the critic.
    DynamicsLoss dloss;
    if (ensemble) {
        const Matrix next_latents = encode_batch(pair.online, batch.next_obs);
        dloss = nll_loss(*ensemble, Z, batch.actions, next_latents);
        metrics.dynamics_loss = dloss.loss;
    }

    const MlpGrads enc_grads = encode_backward(pair.online, cache, loss.dZ);
    pair.online.net.sgd_step(enc_grads, config.learning_rate);
    if (ensemble) sgd_step(*ensemble, dloss.grads, config.learning_rate);
    ema_update(pair);

    return metrics;
}

}  // namespace simsr
