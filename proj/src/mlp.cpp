#include "cmg/mlp.hpp"

#include <cmath>

#include "cmg/errors.hpp"

namespace cmg {

Mlp Mlp::make(const std::vector<int>& dims, Output output, Rng& rng) {
    Mlp net;
    net.output = output;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.W.resize(dims[l], dims[l + 1]);
        layer.b = Eigen::RowVectorXd::Zero(dims[l + 1]);
        const double scale = std::sqrt(2.0 / std::max(1, dims[l]));
        for (int i = 0; i < layer.W.rows(); ++i)
            for (int j = 0; j < layer.W.cols(); ++j) layer.W(i, j) = scale * rng.normal();
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X, Cache* cache) const {
    Eigen::MatrixXd a = X;
    if (cache) {
        cache->acts.clear();
        cache->acts.push_back(a);
    }
    for (size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = (a * layers[l].W).rowwise() + layers[l].b;
        if (l + 1 < layers.size()) {
            a = z.cwiseMax(0.0);
        } else if (output == Output::Sigmoid) {
            a = (1.0 + (-z.array()).exp()).inverse().matrix();
        } else {
            Eigen::VectorXd rowmax = z.rowwise().maxCoeff();
            Eigen::MatrixXd ez = (z.colwise() - rowmax).array().exp().matrix();
            Eigen::VectorXd sums = ez.rowwise().sum();
            a = (ez.array().colwise() / sums.array()).matrix();
        }
        if (cache) cache->acts.push_back(a);
    }
    return a;
}

Mlp::Grads Mlp::zero_grads() const {
    Grads g;
    for (const auto& layer : layers) {
        Layer z;
        z.W = Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols());
        z.b = Eigen::RowVectorXd::Zero(layer.b.cols());
        g.g.push_back(std::move(z));
    }
    return g;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dY,
                              Grads* grads) const {
    const size_t L = layers.size();
    Eigen::MatrixXd dz;
    const Eigen::MatrixXd& out = cache.acts[L];
    if (output == Output::Sigmoid) {
        dz = (dY.array() * out.array() * (1.0 - out.array())).matrix();
    } else {
        Eigen::VectorXd dot = (dY.array() * out.array()).rowwise().sum();
        dz = (out.array() * (dY.colwise() - dot).array()).matrix();
    }
    for (size_t l = L; l-- > 0;) {
        if (grads) {
            grads->g[l].W.noalias() += cache.acts[l].transpose() * dz;
            grads->g[l].b += dz.colwise().sum();
        }
        Eigen::MatrixXd da = dz * layers[l].W.transpose();
        if (l == 0) return da;
        dz = (da.array() * (cache.acts[l].array() > 0.0).cast<double>()).matrix();
    }
    return {};
}

size_t Mlp::param_count() const {
    size_t total = 0;
    for (const auto& layer : layers) total += layer.W.size() + layer.b.size();
    return total;
}

void Mlp::get_params(std::vector<double>& out) const {
    out.clear();
    out.reserve(param_count());
    for (const auto& layer : layers) {
        out.insert(out.end(), layer.W.data(), layer.W.data() + layer.W.size());
        out.insert(out.end(), layer.b.data(), layer.b.data() + layer.b.size());
    }
}

void Mlp::set_params(const std::vector<double>& in) {
    if (in.size() != param_count()) throw DomainError("parameter vector size mismatch");
    size_t at = 0;
    for (auto& layer : layers) {
        std::copy(in.begin() + at, in.begin() + at + layer.W.size(), layer.W.data());
        at += layer.W.size();
        std::copy(in.begin() + at, in.begin() + at + layer.b.size(), layer.b.data());
        at += layer.b.size();
    }
}

void Adam::init(const Mlp& net) {
    t_ = 0;
    m_.clear();
    v_.clear();
    for (const auto& layer : net.layers) {
        Mlp::Layer z;
        z.W = Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols());
        z.b = Eigen::RowVectorXd::Zero(layer.b.cols());
        m_.push_back(z);
        v_.push_back(std::move(z));
    }
}

void Adam::step(Mlp& net, const Mlp::Grads& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, t_);
    const double c2 = 1.0 - std::pow(beta2, t_);
    for (size_t l = 0; l < net.layers.size(); ++l) {
        m_[l].W = beta1 * m_[l].W + (1.0 - beta1) * grads.g[l].W;
        v_[l].W = (beta2 * v_[l].W.array() + (1.0 - beta2) * grads.g[l].W.array().square()).matrix();
        net.layers[l].W.array() -=
            lr * (m_[l].W.array() / c1) / ((v_[l].W.array() / c2).sqrt() + eps);
        m_[l].b = beta1 * m_[l].b + (1.0 - beta1) * grads.g[l].b;
        v_[l].b = (beta2 * v_[l].b.array() + (1.0 - beta2) * grads.g[l].b.array().square()).matrix();
        net.layers[l].b.array() -=
            lr * (m_[l].b.array() / c1) / ((v_[l].b.array() / c2).sqrt() + eps);
    }
}

}  // namespace cmg
