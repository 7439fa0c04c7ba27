#include "simsr/agent.hpp"

#include "simsr/errors.hpp"

#include <cmath>

namespace simsr {
namespace {

constexpr double kCriticHuberDelta = 1.0;

double huber(double r, double delta) {
    const double a = std::abs(r);
    return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

double huber_grad(double r, double delta) {
    if (std::abs(r) <= delta) return r;
    return r > 0.0 ? delta : -delta;
}

}  // namespace

CriticParams CriticParams::make(int latent_dim, int hidden_dim, int n_actions, std::uint64_t seed,
                                double tau, int target_update_freq) {
    if (tau <= 0.0 || tau > 1.0) throw ValidationError("critic: tau must be in (0, 1]");
    if (target_update_freq <= 0)
        throw ValidationError("critic: target_update_freq must be positive");
    CriticParams c;
    c.q1 = Mlp::make({latent_dim, hidden_dim, n_actions}, derive_seed(seed, 1));
    c.q2 = Mlp::make({latent_dim, hidden_dim, n_actions}, derive_seed(seed, 2));
    c.q1_target = c.q1;
    c.q2_target = c.q2;
    c.tau = tau;
    c.target_update_freq = target_update_freq;
    return c;
}

ActorParams ActorParams::make(int latent_dim, int hidden_dim, int n_actions, std::uint64_t seed,
                              double alpha) {
    if (alpha < 0.0) throw ValidationError("actor: alpha must be nonnegative");
    ActorParams a;
    a.pi = Mlp::make({latent_dim, hidden_dim, n_actions}, derive_seed(seed, 3));
    a.alpha = alpha;
    return a;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const Vector row = logits.row(i).transpose();
        const double m = row.maxCoeff();
        Vector e = (row.array() - m).exp();
        p.row(i) = (e / e.sum()).transpose();
    }
    return p;
}

int act(const ActorParams& actor, const Vector& latent, ActMode mode, Rng* rng) {
    const Matrix logits = actor.pi.forward(latent.transpose());
    const int n = static_cast<int>(logits.cols());
    if (mode == ActMode::greedy) {
        int best = 0;
        for (int a = 1; a < n; ++a)
            if (logits(0, a) > logits(0, best)) best = a;  // ties keep the lowest index
        return best;
    }
    if (!rng) throw ValidationError("act: sample mode requires an rng");
    const Matrix p = softmax_rows(logits);
    const double u = rng->uniform();
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        acc += p(0, a);
        if (u < acc) return a;
    }
    return n - 1;
}

CriticUpdateResult critic_update(CriticParams& critic, const ActorParams& actor,
                                 EncoderPair& encoder, const Batch& batch, double gamma, double lr,
                                 bool update_encoder) {
    const int n = batch.size();
    if (n == 0) throw ValidationError("critic_update: empty batch");
    if (gamma < 0.0 || gamma >= 1.0) throw ValidationError("critic_update: gamma out of range");

    EncodeCache cache;
    const Matrix Z = encode_batch(encoder.online, batch.obs, &cache);
    const Matrix Zn = encode_batch(encoder.target, batch.next_obs);  // stop-grad

    const Matrix next_logits = actor.pi.forward(Zn);
    const Matrix next_p = softmax_rows(next_logits);
    const Matrix q1t = critic.q1_target.forward(Zn);
    const Matrix q2t = critic.q2_target.forward(Zn);
    const Matrix qmin = q1t.cwiseMin(q2t);

    // Soft state value under the target nets; time-limit "done" flags do
    // not gate the bootstrap (infinite-horizon semantics).
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (Eigen::Index a = 0; a < next_p.cols(); ++a) {
            const double p = next_p(i, a);
            if (p > 0.0) v += p * (qmin(i, a) - actor.alpha * std::log(p));
        }
        y(i) = batch.rewards(i) + gamma * v;
    }

    CriticUpdateResult result;
    Matrix dZ = Matrix::Zero(Z.rows(), Z.cols());
    Mlp* heads[2] = {&critic.q1, &critic.q2};
    double* losses[2] = {&result.q1_loss, &result.q2_loss};
    for (int k = 0; k < 2; ++k) {
        MlpCache qcache;
        const Matrix q = heads[k]->forward(Z, &qcache);
        Matrix dq = Matrix::Zero(q.rows(), q.cols());
        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double taken = q(i, batch.action_idx[i]);
            result.mean_q += taken / (2.0 * n);
            const double r = taken - y(i);
            loss += huber(r, kCriticHuberDelta) / n;
            dq(i, batch.action_idx[i]) = huber_grad(r, kCriticHuberDelta) / n;
        }
        *losses[k] = loss;
        Matrix dz_k;
        const MlpGrads grads = heads[k]->backward(qcache, dq, update_encoder ? &dz_k : nullptr);
        if (update_encoder) dZ += dz_k;
        heads[k]->sgd_step(grads, lr);
    }

    if (update_encoder) {
        const MlpGrads enc_grads = encode_backward(encoder.online, cache, dZ);
        encoder.online.net.sgd_step(enc_grads, lr);
    }

    ++critic.update_count;
    if (critic.update_count % critic.target_update_freq == 0) critic_target_ema(critic);
    return result;
}

ActorUpdateResult actor_update(ActorParams& actor, const CriticParams& critic,
                               const EncoderParams& encoder, const Batch& batch, double lr) {
    const int n = batch.size();
    if (n == 0) throw ValidationError("actor_update: empty batch");

    const Matrix Z = encode_batch(encoder, batch.obs);  // encoder is read-only here
    MlpCache pcache;
    const Matrix logits = actor.pi.forward(Z, &pcache);
    const Matrix p = softmax_rows(logits);
    const Matrix qmin = critic.q1.forward(Z).cwiseMin(critic.q2.forward(Z));

    ActorUpdateResult result;
    Matrix dlogits(logits.rows(), logits.cols());
    for (int i = 0; i < n; ++i) {
        double li = 0.0;
        double hi = 0.0;
        for (Eigen::Index a = 0; a < p.cols(); ++a) {
            const double pa = p(i, a);
            const double logpa = std::log(std::max(pa, 1e-300));
            li += pa * (actor.alpha * logpa - qmin(i, a));
            hi -= pa * logpa;
        }
        result.loss += li / n;
        result.entropy += hi / n;
        // d/dlogit_b of sum_a p_a g_a is p_b (g_b - L_i); the entropy term's
        // direct derivative cancels exactly.
        for (Eigen::Index b = 0; b < p.cols(); ++b) {
            const double pb = p(i, b);
            const double gb = actor.alpha * std::log(std::max(pb, 1e-300)) - qmin(i, b);
            dlogits(i, b) = pb * (gb - li) / n;
        }
    }

    const MlpGrads grads = actor.pi.backward(pcache, dlogits);
    actor.pi.sgd_step(grads, lr);
    return result;
}

void critic_target_ema(CriticParams& critic) {
    // tau is the step toward online, so the EMA momentum is 1 - tau.
    ema_update(critic.q1_target, critic.q1, 1.0 - critic.tau);
    ema_update(critic.q2_target, critic.q2, 1.0 - critic.tau);
}

}  // namespace simsr
