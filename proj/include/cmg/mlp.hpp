#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmg/rng.hpp"

namespace cmg {

// Small dense network: rectifier hidden layers, sigmoid or softmax output.
// Rows of the input matrix are samples.
struct Mlp {
    enum class Output { Sigmoid, Softmax };

    struct Layer {
        Eigen::MatrixXd W;     // in x out
        Eigen::RowVectorXd b;  // 1 x out
    };

    std::vector<Layer> layers;
    Output output = Output::Sigmoid;

    static Mlp make(const std::vector<int>& dims, Output output, Rng& rng);

    struct Cache {
        std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[i] = layer i output
    };

    Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Cache* cache = nullptr) const;

    struct Grads {
        std::vector<Layer> g;
    };
    Grads zero_grads() const;

    // dY is dL/d(output after the output activation); returns dL/dX.
    Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dY, Grads* grads) const;

    int in_dim() const { return static_cast<int>(layers.front().W.rows()); }
    int out_dim() const { return static_cast<int>(layers.back().W.cols()); }
    size_t param_count() const;
    void get_params(std::vector<double>& out) const;
    std::vector<double> get_params() const {
        std::vector<double> out;
        get_params(out);
        return out;
    }
    void set_params(const std::vector<double>& in);
};

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void init(const Mlp& net);
    // Applies a descent step; negate grads beforehand for ascent.
    void step(Mlp& net, const Mlp::Grads& grads);

  private:
    int t_ = 0;
    std::vector<Mlp::Layer> m_, v_;
};

}  // namespace cmg
