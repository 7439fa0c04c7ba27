#include "simsr/dynamics.hpp"

#include "simsr/errors.hpp"

#include <cmath>

namespace simsr {
namespace {

void check_shapes(const DynamicsEnsemble& e, const Matrix& latents, const Matrix& actions) {
    if (e.heads.empty()) throw ValidationError("dynamics: empty ensemble");
    if (latents.cols() != e.latent_dim) throw DimensionError("dynamics: latent width mismatch");
    if (actions.cols() != e.action_dim) throw DimensionError("dynamics: action width mismatch");
    if (latents.rows() != actions.rows()) throw DimensionError("dynamics: batch size mismatch");
    if (!latents.allFinite() || !actions.allFinite())
        throw ValidationError("dynamics: non-finite inputs");
}

Matrix join_inputs(const Matrix& latents, const Matrix& actions) {
    Matrix in(latents.rows(), latents.cols() + actions.cols());
    in << latents, actions;
    return in;
}

}  // namespace

DynamicsEnsemble DynamicsEnsemble::make(int latent_dim, int action_dim, int hidden_dim, int K,
                                        std::uint64_t seed) {
    if (K <= 0) throw ValidationError("DynamicsEnsemble: K must be positive");
    if (latent_dim <= 0 || action_dim <= 0 || hidden_dim <= 0)
        throw ValidationError("DynamicsEnsemble: dims must be positive");
    DynamicsEnsemble e;
    e.latent_dim = latent_dim;
    e.action_dim = action_dim;
    for (int k = 0; k < K; ++k) {
        // Distinct derived seeds keep heads independently initialized.
        e.heads.push_back(
            Mlp::make({latent_dim + action_dim, hidden_dim, 2 * latent_dim},
                      derive_seed(seed, static_cast<std::uint64_t>(k))));
    }
    return e;
}

GaussianPrediction predict(const DynamicsEnsemble& ensemble, int head, const Matrix& latents,
                           const Matrix& actions) {
    check_shapes(ensemble, latents, actions);
    if (head < 0 || head >= ensemble.size())
        throw ValidationError("dynamics: head index out of range");
    const Matrix out = ensemble.heads[head].forward(join_inputs(latents, actions));
    GaussianPrediction p;
    p.mean = out.leftCols(ensemble.latent_dim);
    p.log_var =
        out.rightCols(ensemble.latent_dim).cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
    return p;
}

DynamicsLoss nll_loss(const DynamicsEnsemble& ensemble, const Matrix& latents,
                      const Matrix& actions, const Matrix& targets) {
    check_shapes(ensemble, latents, actions);
    if (targets.rows() != latents.rows() || targets.cols() != ensemble.latent_dim)
        throw DimensionError("nll_loss: target shape mismatch");
    if (!targets.allFinite()) throw ValidationError("nll_loss: non-finite targets");

    const Matrix in = join_inputs(latents, actions);
    const int K = ensemble.size();
    const double scale = 1.0 / (static_cast<double>(K) * latents.rows() * ensemble.latent_dim);

    DynamicsLoss result;
    for (int k = 0; k < K; ++k) {
        MlpCache cache;
        const Matrix out = ensemble.heads[k].forward(in, &cache);
        const Matrix mean = out.leftCols(ensemble.latent_dim);
        const Matrix lv_raw = out.rightCols(ensemble.latent_dim);
        const Matrix lv = lv_raw.cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
        const Matrix var = lv.array().exp().matrix();
        const Matrix err = mean - targets;

        result.loss +=
            scale * (0.5 * lv.array() + err.array().square() / (2.0 * var.array())).sum();

        // d/dmean = (mean - target)/var; d/dlv = 0.5*(1 - err^2/var), zeroed
        // where the clamp is active (hard clamp, zero gradient outside).
        Matrix d_out(out.rows(), out.cols());
        d_out.leftCols(ensemble.latent_dim) = scale * (err.array() / var.array()).matrix();
        Matrix d_lv =
            (scale * 0.5 * (1.0 - err.array().square() / var.array())).matrix();
        d_lv.array() *=
            ((lv_raw.array() > kLogVarMin) && (lv_raw.array() < kLogVarMax)).cast<double>();
        d_out.rightCols(ensemble.latent_dim) = d_lv;

        result.grads.push_back(ensemble.heads[k].backward(cache, d_out));
    }
    return result;
}

int sample_head(const DynamicsEnsemble& ensemble, Rng& rng) {
    return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(ensemble.size())));
}

DynamicsSample sample_next(const DynamicsEnsemble& ensemble, const Vector& latent,
                           const Vector& action, Rng& rng) {
    DynamicsSample s;
    s.head = sample_head(ensemble, rng);
    const GaussianPrediction p =
        predict(ensemble, s.head, latent.transpose(), action.transpose());
    s.latent.resize(ensemble.latent_dim);
    for (int d = 0; d < ensemble.latent_dim; ++d)
        s.latent(d) = p.mean(0, d) + std::sqrt(std::exp(p.log_var(0, d))) * rng.normal();
    return s;
}

Matrix sample_next_batch(const DynamicsEnsemble& ensemble, int head, const Matrix& latents,
                         const Matrix& actions, Rng& rng) {
    const GaussianPrediction p = predict(ensemble, head, latents, actions);
    Matrix out(latents.rows(), ensemble.latent_dim);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (int d = 0; d < ensemble.latent_dim; ++d)
            out(i, d) = p.mean(i, d) + std::sqrt(std::exp(p.log_var(i, d))) * rng.normal();
    return out;
}

void sgd_step(DynamicsEnsemble& ensemble, const std::vector<MlpGrads>& grads, double lr) {
    if (grads.size() != ensemble.heads.size())
        throw DimensionError("dynamics sgd_step: gradient count mismatch");
    for (std::size_t k = 0; k < grads.size(); ++k) ensemble.heads[k].sgd_step(grads[k], lr);
}

}  // namespace simsr
