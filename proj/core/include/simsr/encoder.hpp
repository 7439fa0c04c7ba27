#pragma once

#include "simsr/mlp.hpp"
#include "simsr/types.hpp"

#include <cstdint>

namespace simsr {

// Observation -> latent map: MLP followed by L2 normalization, so every
// output lies on the unit sphere and cosine self-distance is exactly zero.
struct EncoderParams {
    Mlp net;

    // obs_dim -> hidden (ReLU) -> hidden (ReLU) -> latent_dim.
    static EncoderParams make(int obs_dim, int hidden_dim, int latent_dim, std::uint64_t seed);
    // Single linear layer with W = I, b = 0; passes one-hot inputs through
    // unchanged. Test utility and tabular-agent substitute.
    static EncoderParams identity(int dim);

    int obs_dim() const { return net.in_dim(); }
    int latent_dim() const { return net.out_dim(); }
};

struct EncodeCache {
    MlpCache mlp;
    Matrix raw;    // pre-normalization outputs, n x latent
    Vector norms;  // row norms of raw
    Matrix z;      // normalized outputs
};

// Throws ValidationError when a pre-normalization row norm is <= 1e-12
// (degenerate inputs are surfaced, never epsilon-clamped).
Vector encode(const EncoderParams& params, const Vector& obs);
Matrix encode_batch(const EncoderParams& params, const Matrix& obs, EncodeCache* cache = nullptr);

// Exact gradient of the normalized outputs w.r.t. parameters. upstream is
// dLoss/dZ (n x latent); dObs receives dLoss/dObs when requested.
MlpGrads encode_backward(const EncoderParams& params, const EncodeCache& cache,
                         const Matrix& upstream, Matrix* dObs = nullptr);

// 1 - <u, v> for unit vectors, clamped to [0, 2]. Inputs must be unit-norm
// within 1e-5; violations raise ValidationError.
double cos_distance(const Vector& u, const Vector& v);

// Same distance but normalizes the inputs internally. Exists for the one
// call path that feeds raw Gaussian dynamics samples (which do not live on
// the sphere) into the metric target.
double cos_distance_general(const Vector& u, const Vector& v);
Matrix cos_distance_matrix_general(const Matrix& A, const Matrix& B);

// Entry (i, j) = cos_distance(row i of A, row j of B); rows must be
// unit-norm within 1e-5.
Matrix cos_distance_matrix(const Matrix& A, const Matrix& B);

struct EncoderPair {
    EncoderParams online;
    EncoderParams target;
    double momentum = 0.95;  // target <- m*target + (1-m)*online

    static EncoderPair make(int obs_dim, int hidden_dim, int latent_dim, std::uint64_t seed,
                            double momentum = 0.95);
};

void ema_update(EncoderPair& pair);

}  // namespace simsr
