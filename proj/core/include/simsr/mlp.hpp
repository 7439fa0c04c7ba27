#pragma once

#include "simsr/types.hpp"

#include <cstdint>
#include <vector>

namespace simsr {

// Fully connected layer; rows of W are output units.
struct Linear {
    Matrix W;
    Vector b;
};

// Per-layer activations kept from a forward pass so backward can be exact.
// pre[l] holds the pre-activation of layer l; post[l] the layer output
// after ReLU (the last layer has no ReLU, so post.back() == pre.back()).
struct MlpCache {
    Matrix input;
    std::vector<Matrix> pre;
    std::vector<Matrix> post;
};

struct MlpGrads {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
};

// Plain MLP with ReLU between layers and a linear final layer. Batches are
// row-major: X is n x in_dim, outputs are n x out_dim.
struct Mlp {
    std::vector<Linear> layers;

    // dims = {in, hidden..., out}; weights and biases drawn uniformly from
    // [-1/sqrt(fan_in), 1/sqrt(fan_in)] in a fixed order (per layer: W
    // row-major, then b), so a seed pins every parameter.
    static Mlp make(const std::vector<int>& dims, std::uint64_t seed);

    int in_dim() const;
    int out_dim() const;
    std::size_t param_count() const;

    Matrix forward(const Matrix& X, MlpCache* cache = nullptr) const;
    // upstream is dLoss/dOutput (n x out_dim). Fills dX (n x in_dim) when
    // requested so gradients can chain into an upstream network.
    MlpGrads backward(const MlpCache& cache, const Matrix& upstream, Matrix* dX = nullptr) const;

    void sgd_step(const MlpGrads& grads, double lr);

    // Parameter vector in the same fixed order as initialization; used by
    // finite-difference tests and checkpoints.
    Vector flatten() const;
    void unflatten(const Vector& theta);
};

MlpGrads zero_grads_like(const Mlp& net);
void accumulate(MlpGrads& into, const MlpGrads& other, double scale = 1.0);

// target <- m * target + (1 - m) * online, elementwise over all parameters.
void ema_update(Mlp& target, const Mlp& online, double m);

}  // namespace simsr
