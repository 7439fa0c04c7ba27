#pragma once

#include "simsr/mlp.hpp"
#include "simsr/rng.hpp"
#include "simsr/types.hpp"

#include <cstdint>
#include <vector>

namespace simsr {

// Variance clamp for the Gaussian heads: sigma^2 in [1e-6, 1e2].
constexpr double kLogVarMin = -13.815510557964274;  // log(1e-6)
constexpr double kLogVarMax = 4.605170185988092;    // log(1e2)

// K independently initialized probabilistic heads, each an MLP from
// (latent, one-hot action) to (mean, log-variance) over the latent space.
struct DynamicsEnsemble {
    std::vector<Mlp> heads;
    int latent_dim = 0;
    int action_dim = 0;

    static DynamicsEnsemble make(int latent_dim, int action_dim, int hidden_dim, int K,
                                 std::uint64_t seed);
    int size() const { return static_cast<int>(heads.size()); }
};

struct DynamicsLoss {
    double loss = 0.0;
    std::vector<MlpGrads> grads;  // one per head
};

struct GaussianPrediction {
    Matrix mean;     // n x latent
    Matrix log_var;  // n x latent, clamped
};

GaussianPrediction predict(const DynamicsEnsemble& ensemble, int head, const Matrix& latents,
                           const Matrix& actions);

// Mean over heads of the per-dimension Gaussian NLL
// [log sigma^2 / 2 + (target - mean)^2 / (2 sigma^2)], averaged over batch
// and latent dimensions. Gradients are exact and do not flow into targets.
DynamicsLoss nll_loss(const DynamicsEnsemble& ensemble, const Matrix& latents,
                      const Matrix& actions, const Matrix& targets);

struct DynamicsSample {
    Vector latent;  // mean + sigma * z; NOT re-normalized to the sphere
    int head = 0;
};

// Draws head ~ Uniform(0..K-1) then a diagonal Gaussian sample.
DynamicsSample sample_next(const DynamicsEnsemble& ensemble, const Vector& latent,
                           const Vector& action, Rng& rng);

int sample_head(const DynamicsEnsemble& ensemble, Rng& rng);

// Per-row samples from one fixed head (the loss target uses a single head
// per batch).
Matrix sample_next_batch(const DynamicsEnsemble& ensemble, int head, const Matrix& latents,
                         const Matrix& actions, Rng& rng);

void sgd_step(DynamicsEnsemble& ensemble, const std::vector<MlpGrads>& grads, double lr);

}  // namespace simsr
