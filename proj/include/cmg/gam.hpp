#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmg/mlp.hpp"
#include "cmg/types.hpp"

namespace cmg {

// Conditional generator Q(x, r; beta): input [x r] (or r alone for the
// unconditional/pooling variant), sigmoid output of width m*n, binarized at
// 0.5 with a straight-through gradient on snap iterations.
struct GeneratorNet {
    Mlp net;
    int mn = 0;
    bool conditional = true;
};

// z(e; x~; theta): softmax over the exploit set.
struct AttackerNet {
    Mlp net;
};

struct TrainConfig {
    int batch = 5000;          // sample count (fixed i.i.d. batch)
    int outer_iters = 500;
    int inner_steps = 5;       // attacker ascent steps per outer iteration
    double lr_defender = 3e-4;
    double lr_attacker = 3e-3;
    int snap_period = 10;      // binarization period (distinct from batch size)
    int hidden = 64;           // width of the two hidden layers
    int atk_warmup = 300;      // attacker-only steps before alternation starts
    double gen_bias_init = -3.0;  // output-layer bias; negative starts mask-heavy
    int restarts = 1;          // independent runs; keep the best final loss
    uint64_t seed = 0;

    void validate() const;
};

// Fixed training batch: configurations, uniform noise and the precomputed
// per-exploit value vector sum_k v(x^k) delta(x^k in X^e) (independent of y).
struct SampleBatch {
    Eigen::MatrixXd X;      // batch x m*n
    Eigen::MatrixXd R;      // batch x m*n, uniform [0,1)
    Eigen::MatrixXd delta;  // batch x |E|
};

SampleBatch draw_batch(const GameSpec& game, int count, Rng& rng);

Eigen::MatrixXd binarize(const Eigen::MatrixXd& y);  // >= 0.5 -> 1

// Forward pass of the generator on a batch; snapped outputs are exactly binary.
Eigen::MatrixXd generator_forward(const GeneratorNet& gen, const Eigen::MatrixXd& X,
                                  const Eigen::MatrixXd& R, bool snap,
                                  Mlp::Cache* cache = nullptr);

// Single-sample convenience wrapper.
std::vector<double> generator_forward(const GeneratorNet& gen, const Config& x,
                                      const std::vector<double>& r, bool snap);

struct LossParts {
    double attack = 0.0;
    double cost = 0.0;
    double total = 0.0;
};

LossParts gam_loss(const GeneratorNet& gen, const AttackerNet& atk, const SampleBatch& batch,
                   const GameSpec& game, bool snap);

// Loss plus reverse-mode gradients for both parameter sets; gradients flow
// through the attacker's input x~ into the generator.
LossParts gam_loss_grad(const GeneratorNet& gen, const AttackerNet& atk,
                        const SampleBatch& batch, const GameSpec& game, bool snap,
                        Mlp::Grads* gen_grads, Mlp::Grads* atk_grads);

struct GamResult {
    GeneratorNet gen;
    AttackerNet atk;
    std::vector<double> loss_history;  // one entry per outer iteration
    double final_loss = 0.0;           // snapped training-batch loss
    uint64_t seed = 0;
    TrainConfig cfg;
};

GamResult train_gam(const GameSpec& game, const TrainConfig& cfg);

// Pooling baseline: generator conditioned on noise only.
GamResult train_unconditional(const GameSpec& game, const TrainConfig& cfg);

// Flat numeric archive (shapes, activation tags, seed, cfg echo, parameters).
void save_net_archive(const GamResult& result, const std::string& path);
GamResult load_net_archive(const std::string& path);

}  // namespace cmg
