#include "simsr/mlp.hpp"

#include "simsr/errors.hpp"
#include "simsr/rng.hpp"

#include <cmath>

namespace simsr {

Mlp Mlp::make(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw ValidationError("Mlp::make: need at least input and output dims");
    for (int d : dims)
        if (d <= 0) throw ValidationError("Mlp::make: dims must be positive");
    Rng rng(seed);
    Mlp net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l];
        const int out = dims[l + 1];
        const double k = 1.0 / std::sqrt(static_cast<double>(in));
        Linear layer;
        layer.W.resize(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) layer.W(r, c) = rng.uniform(-k, k);
        layer.b.resize(out);
        for (int r = 0; r < out; ++r) layer.b(r) = rng.uniform(-k, k);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

int Mlp::in_dim() const { return static_cast<int>(layers.front().W.cols()); }
int Mlp::out_dim() const { return static_cast<int>(layers.back().W.rows()); }

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const Linear& l : layers) n += static_cast<std::size_t>(l.W.size()) + l.b.size();
    return n;
}

Matrix Mlp::forward(const Matrix& X, MlpCache* cache) const {
    if (X.cols() != in_dim()) throw DimensionError("Mlp::forward: input width mismatch");
    if (cache) {
        cache->input = X;
        cache->pre.clear();
        cache->post.clear();
    }
    Matrix h = X;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix z = (h * layers[l].W.transpose()).rowwise() + layers[l].b.transpose();
        if (cache) cache->pre.push_back(z);
        if (l + 1 < layers.size()) z = z.cwiseMax(0.0);
        if (cache) cache->post.push_back(z);
        h = std::move(z);
    }
    return h;
}

MlpGrads Mlp::backward(const MlpCache& cache, const Matrix& upstream, Matrix* dX) const {
    if (cache.pre.size() != layers.size())
        throw DimensionError("Mlp::backward: cache does not match network depth");
    if (upstream.rows() != cache.input.rows() || upstream.cols() != out_dim())
        throw DimensionError("Mlp::backward: upstream gradient shape mismatch");

    MlpGrads grads = zero_grads_like(*this);
    Matrix delta = upstream;
    for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
        const Matrix& in = (l == 0) ? cache.input : cache.post[l - 1];
        grads.dW[l].noalias() = delta.transpose() * in;
        grads.db[l] = delta.colwise().sum().transpose();
        if (l > 0 || dX) {
            Matrix d_in = delta * layers[l].W;
            if (l > 0) {
                // ReLU mask from the previous layer's pre-activation.
                d_in.array() *= (cache.pre[l - 1].array() > 0.0).cast<double>();
                delta = std::move(d_in);
            } else {
                *dX = std::move(d_in);
            }
        }
    }
    return grads;
}

void Mlp::sgd_step(const MlpGrads& grads, double lr) {
    if (grads.dW.size() != layers.size()) throw DimensionError("sgd_step: gradient depth mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].W -= lr * grads.dW[l];
        layers[l].b -= lr * grads.db[l];
    }
}

Vector Mlp::flatten() const {
    Vector theta(param_count());
    Eigen::Index k = 0;
    for (const Linear& l : layers) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) theta(k++) = l.W(r, c);
        for (Eigen::Index r = 0; r < l.b.size(); ++r) theta(k++) = l.b(r);
    }
    return theta;
}

void Mlp::unflatten(const Vector& theta) {
    if (theta.size() != static_cast<Eigen::Index>(param_count()))
        throw DimensionError("Mlp::unflatten: parameter count mismatch");
    Eigen::Index k = 0;
    for (Linear& l : layers) {
        for (Eigen::Index r = 0; r < l.W.rows(); ++r)
            for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = theta(k++);
        for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = theta(k++);
    }
}

MlpGrads zero_grads_like(const Mlp& net) {
    MlpGrads g;
    for (const Linear& l : net.layers) {
        g.dW.push_back(Matrix::Zero(l.W.rows(), l.W.cols()));
        g.db.push_back(Vector::Zero(l.b.size()));
    }
    return g;
}

void accumulate(MlpGrads& into, const MlpGrads& other, double scale) {
    if (into.dW.size() != other.dW.size()) throw DimensionError("accumulate: depth mismatch");
    for (std::size_t l = 0; l < into.dW.size(); ++l) {
        into.dW[l] += scale * other.dW[l];
        into.db[l] += scale * other.db[l];
    }
}

void ema_update(Mlp& target, const Mlp& online, double m) {
    if (target.layers.size() != online.layers.size())
        throw DimensionError("ema_update: network depth mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        target.layers[l].W = m * target.layers[l].W + (1.0 - m) * online.layers[l].W;
        target.layers[l].b = m * target.layers[l].b + (1.0 - m) * online.layers[l].b;
    }
}

}  // namespace simsr
