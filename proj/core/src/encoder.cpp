#include "simsr/encoder.hpp"

#include "simsr/errors.hpp"

#include <cmath>

namespace simsr {
namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kUnitTol = 1e-5;

void require_unit_rows(const Matrix& A, const char* who) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double n = A.row(i).norm();
        if (std::abs(n - 1.0) > kUnitTol)
            throw ValidationError(std::string(who) + ": row " + std::to_string(i) +
                                  " is not unit-norm (|" + std::to_string(n) + "| - 1 > 1e-5)");
    }
}

Matrix normalize_rows(const Matrix& raw, Vector* norms) {
    Matrix z(raw.rows(), raw.cols());
    if (norms) norms->resize(raw.rows());
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        const double n = raw.row(i).norm();
        if (n <= kDegenerateNorm)
            throw ValidationError("encode: degenerate pre-normalization output (norm " +
                                  std::to_string(n) + ") at row " + std::to_string(i));
        z.row(i) = raw.row(i) / n;
        if (norms) (*norms)(i) = n;
    }
    return z;
}

}  // namespace

EncoderParams EncoderParams::make(int obs_dim, int hidden_dim, int latent_dim,
                                  std::uint64_t seed) {
    return {Mlp::make({obs_dim, hidden_dim, hidden_dim, latent_dim}, seed)};
}

EncoderParams EncoderParams::identity(int dim) {
    Mlp net;
    net.layers.push_back({Matrix::Identity(dim, dim), Vector::Zero(dim)});
    return {std::move(net)};
}

Vector encode(const EncoderParams& params, const Vector& obs) {
    return encode_batch(params, obs.transpose()).row(0).transpose();
}

Matrix encode_batch(const EncoderParams& params, const Matrix& obs, EncodeCache* cache) {
    Matrix raw = params.net.forward(obs, cache ? &cache->mlp : nullptr);
    Vector norms;
    Matrix z = normalize_rows(raw, &norms);
    if (cache) {
        cache->raw = std::move(raw);
        cache->norms = std::move(norms);
        cache->z = z;
    }
    return z;
}

MlpGrads encode_backward(const EncoderParams& params, const EncodeCache& cache,
                         const Matrix& upstream, Matrix* dObs) {
    if (upstream.rows() != cache.z.rows() || upstream.cols() != cache.z.cols())
        throw DimensionError("encode_backward: upstream shape mismatch");
    // L2-normalization Jacobian: for z = y/||y||,
    // dL/dy = (g - <z, g> z) / ||y|| — the radial component of g is
    // projected out, so upstream gradients parallel to z vanish.
    Matrix d_raw(upstream.rows(), upstream.cols());
    for (Eigen::Index i = 0; i < upstream.rows(); ++i) {
        const double radial = cache.z.row(i).dot(upstream.row(i));
        d_raw.row(i) = (upstream.row(i) - radial * cache.z.row(i)) / cache.norms(i);
    }
    return params.net.backward(cache.mlp, d_raw, dObs);
}

double cos_distance(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DimensionError("cos_distance: dimension mismatch");
    if (std::abs(u.norm() - 1.0) > kUnitTol || std::abs(v.norm() - 1.0) > kUnitTol)
        throw ValidationError("cos_distance: inputs must be unit-norm within 1e-5");
    const double d = 1.0 - u.dot(v);
    return std::min(2.0, std::max(0.0, d));
}

double cos_distance_general(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DimensionError("cos_distance_general: dimension mismatch");
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu <= kDegenerateNorm || nv <= kDegenerateNorm)
        throw ValidationError("cos_distance_general: zero-norm input");
    const double d = 1.0 - u.dot(v) / (nu * nv);
    return std::min(2.0, std::max(0.0, d));
}

Matrix cos_distance_matrix(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols()) throw DimensionError("cos_distance_matrix: dimension mismatch");
    require_unit_rows(A, "cos_distance_matrix");
    require_unit_rows(B, "cos_distance_matrix");
    Matrix d = Matrix::Ones(A.rows(), B.rows()) - A * B.transpose();
    return d.cwiseMax(0.0).cwiseMin(2.0);
}

Matrix cos_distance_matrix_general(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols())
        throw DimensionError("cos_distance_matrix_general: dimension mismatch");
    const Matrix An = normalize_rows(A, nullptr);
    const Matrix Bn = normalize_rows(B, nullptr);
    Matrix d = Matrix::Ones(An.rows(), Bn.rows()) - An * Bn.transpose();
    return d.cwiseMax(0.0).cwiseMin(2.0);
}

EncoderPair EncoderPair::make(int obs_dim, int hidden_dim, int latent_dim, std::uint64_t seed,
                              double momentum) {
    if (momentum < 0.0 || momentum >= 1.0)
        throw ValidationError("EncoderPair: momentum must be in [0, 1)");
    EncoderPair pair;
    pair.online = EncoderParams::make(obs_dim, hidden_dim, latent_dim, seed);
    pair.target = pair.online;
    pair.momentum = momentum;
    return pair;
}

void ema_update(EncoderPair& pair) { ema_update(pair.target.net, pair.online.net, pair.momentum); }

}  // namespace simsr
