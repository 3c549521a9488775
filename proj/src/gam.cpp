#include "cmg/gam.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "cmg/errors.hpp"
#include "cmg/game.hpp"

namespace cmg {

void TrainConfig::validate() const {
    if (batch < 1 || outer_iters < 1 || inner_steps < 1 || snap_period < 1 || hidden < 1 ||
        restarts < 1)
        throw SpecError("train config counts must be >= 1");
    if (lr_defender <= 0.0 || lr_attacker <= 0.0)
        throw SpecError("learning rates must be positive");
}

SampleBatch draw_batch(const GameSpec& game, int count, Rng& rng) {
    const int len = game.joint_len();
    SampleBatch batch;
    batch.X.resize(count, len);
    batch.R.resize(count, len);
    batch.delta.resize(count, static_cast<int>(game.exploits.size()));
    Config x;
    for (int i = 0; i < count; ++i) {
        x = sample_joint(game, rng);
        for (int j = 0; j < len; ++j) {
            batch.X(i, j) = x[j];
            batch.R(i, j) = rng.uniform01();
        }
        const auto d = game.delta_vector(x);
        for (size_t e = 0; e < d.size(); ++e) batch.delta(i, static_cast<int>(e)) = d[e];
    }
    return batch;
}

Eigen::MatrixXd binarize(const Eigen::MatrixXd& y) {
    return (y.array() >= 0.5).cast<double>().matrix();
}

Eigen::MatrixXd generator_forward(const GeneratorNet& gen, const Eigen::MatrixXd& X,
                                  const Eigen::MatrixXd& R, bool snap, Mlp::Cache* cache) {
    Eigen::MatrixXd in;
    if (gen.conditional) {
        in.resize(X.rows(), X.cols() + R.cols());
        in << X, R;
    } else {
        in = R;
    }
    Eigen::MatrixXd y = gen.net.forward(in, cache);
    if (!y.allFinite()) throw TrainingError("generator produced non-finite activations", -1);
    return snap ? binarize(y) : y;
}

std::vector<double> generator_forward(const GeneratorNet& gen, const Config& x,
                                      const std::vector<double>& r, bool snap) {
    Eigen::MatrixXd X(1, x.size()), R(1, r.size());
    for (size_t i = 0; i < x.size(); ++i) X(0, i) = x[i];
    for (size_t i = 0; i < r.size(); ++i) R(0, i) = r[i];
    Eigen::MatrixXd y = generator_forward(gen, X, R, snap);
    return std::vector<double>(y.data(), y.data() + y.size());
}

namespace {

Eigen::RowVectorXd joint_cost_row(const GameSpec& game) {
    const int len = game.joint_len();
    Eigen::RowVectorXd c(len);
    for (int i = 0; i < len; ++i) c(i) = game.cost.per_attribute[i % game.schema.n];
    return c;
}

}  // namespace

LossParts gam_loss(const GeneratorNet& gen, const AttackerNet& atk, const SampleBatch& batch,
                   const GameSpec& game, bool snap) {
    return gam_loss_grad(gen, atk, batch, game, snap, nullptr, nullptr);
}

LossParts gam_loss_grad(const GeneratorNet& gen, const AttackerNet& atk,
                        const SampleBatch& batch, const GameSpec& game, bool snap,
                        Mlp::Grads* gen_grads, Mlp::Grads* atk_grads) {
    const int count = static_cast<int>(batch.X.rows());
    const double inv = 1.0 / count;
    const Eigen::RowVectorXd cost_row = joint_cost_row(game);
    const bool has_exploits = batch.delta.cols() > 0;

    Mlp::Cache gen_cache;
    Eigen::MatrixXd y = generator_forward(gen, batch.X, batch.R, snap, &gen_cache);

    LossParts parts;
    parts.cost = inv * ((1.0 - y.array()).matrix() * cost_row.transpose()).sum();

    Eigen::MatrixXd d_y = Eigen::MatrixXd::Constant(count, y.cols(), 0.0);
    d_y.rowwise() -= inv * cost_row;

    if (has_exploits) {
        Eigen::MatrixXd xt = batch.X.cwiseProduct(y);
        Mlp::Cache atk_cache;
        Eigen::MatrixXd z = atk.net.forward(xt, &atk_cache);
        if (!z.allFinite()) throw TrainingError("attacker produced non-finite activations", -1);
        parts.attack = inv * z.cwiseProduct(batch.delta).sum();

        const Eigen::MatrixXd d_z = inv * batch.delta;
        Mlp::Grads atk_local = atk.net.zero_grads();
        Eigen::MatrixXd d_xt =
            atk.net.backward(atk_cache, d_z, atk_grads ? atk_grads : &atk_local);
        if (gen_grads) d_y += d_xt.cwiseProduct(batch.X);
    }
    parts.total = parts.attack + parts.cost;
    if (!std::isfinite(parts.total)) throw TrainingError("non-finite loss", -1);

    if (gen_grads) {
        // Straight-through: the threshold passes gradients unchanged, the
        // sigmoid derivative is applied inside Mlp::backward.
        gen.net.backward(gen_cache, d_y, gen_grads);
    }
    return parts;
}

namespace {

GamResult train_impl(const GameSpec& game, const TrainConfig& cfg, bool conditional) {
    game.validate();
    cfg.validate();
    const int len = game.joint_len();
    const int ne = static_cast<int>(game.exploits.size());

    Rng rng(cfg.seed);
    SampleBatch batch = draw_batch(game, cfg.batch, rng);

    GamResult result;
    result.seed = cfg.seed;
    result.cfg = cfg;
    result.gen.mn = len;
    result.gen.conditional = conditional;
    const int gen_in = conditional ? 2 * len : len;
    result.gen.net = Mlp::make({gen_in, cfg.hidden, cfg.hidden, len}, Mlp::Output::Sigmoid, rng);
    result.gen.net.layers.back().b.setConstant(cfg.gen_bias_init);
    if (ne > 0)
        result.atk.net = Mlp::make({len, cfg.hidden, cfg.hidden, ne}, Mlp::Output::Softmax, rng);

    Adam gen_opt, atk_opt;
    gen_opt.lr = cfg.lr_defender;
    atk_opt.lr = cfg.lr_attacker;
    gen_opt.init(result.gen.net);
    if (ne > 0) atk_opt.init(result.atk.net);

    const Eigen::RowVectorXd cost_row = joint_cost_row(game);
    const double inv = 1.0 / cfg.batch;

    if (ne > 0 && cfg.atk_warmup > 0) {
        // Ascent against the initial generator so the attack term is live
        // before the first defender step.
        Eigen::MatrixXd y = generator_forward(result.gen, batch.X, batch.R, false);
        Eigen::MatrixXd xt = batch.X.cwiseProduct(y);
        const Eigen::MatrixXd d_z = inv * batch.delta;
        for (int s = 0; s < cfg.atk_warmup; ++s) {
            Mlp::Cache atk_cache;
            Eigen::MatrixXd z = result.atk.net.forward(xt, &atk_cache);
            if (!z.allFinite()) throw TrainingError("attacker diverged in warmup", 0);
            Mlp::Grads g = result.atk.net.zero_grads();
            result.atk.net.backward(atk_cache, d_z, &g);
            for (auto& layer : g.g) {
                layer.W = -layer.W;
                layer.b = -layer.b;
            }
            atk_opt.step(result.atk.net, g);
        }
    }

    for (int t = 1; t <= cfg.outer_iters; ++t) {
        const bool snap = (t % cfg.snap_period == 0) || t == cfg.outer_iters;
        try {
            Mlp::Cache gen_cache;
            Eigen::MatrixXd y =
                generator_forward(result.gen, batch.X, batch.R, snap, &gen_cache);

            if (ne > 0) {
                // Inner ascent: the generator (and thus x~) is fixed.
                Eigen::MatrixXd xt = batch.X.cwiseProduct(y);
                const Eigen::MatrixXd d_z = inv * batch.delta;
                for (int s = 0; s < cfg.inner_steps; ++s) {
                    Mlp::Cache atk_cache;
                    Eigen::MatrixXd z = result.atk.net.forward(xt, &atk_cache);
                    if (!z.allFinite())
                        throw TrainingError("attacker diverged", t);
                    Mlp::Grads g = result.atk.net.zero_grads();
                    result.atk.net.backward(atk_cache, d_z, &g);
                    for (auto& layer : g.g) {  // ascent
                        layer.W = -layer.W;
                        layer.b = -layer.b;
                    }
                    atk_opt.step(result.atk.net, g);
                }
            }

            // Defender descent through the attacker's input.
            LossParts parts;
            Eigen::MatrixXd d_y = Eigen::MatrixXd::Zero(cfg.batch, len);
            d_y.rowwise() -= inv * cost_row;
            parts.cost = inv * ((1.0 - y.array()).matrix() * cost_row.transpose()).sum();
            if (ne > 0) {
                Eigen::MatrixXd xt = batch.X.cwiseProduct(y);
                Mlp::Cache atk_cache;
                Eigen::MatrixXd z = result.atk.net.forward(xt, &atk_cache);
                parts.attack = inv * z.cwiseProduct(batch.delta).sum();
                Eigen::MatrixXd d_xt = result.atk.net.backward(atk_cache, inv * batch.delta, nullptr);
                d_y += d_xt.cwiseProduct(batch.X);
            }
            parts.total = parts.attack + parts.cost;
            if (!std::isfinite(parts.total)) throw TrainingError("non-finite loss", t);

            Mlp::Grads g = result.gen.net.zero_grads();
            result.gen.net.backward(gen_cache, d_y, &g);
            gen_opt.step(result.gen.net, g);

            result.loss_history.push_back(parts.total);
        } catch (const TrainingError& e) {
            throw TrainingError(std::string(e.what()) + " at iteration " + std::to_string(t), t);
        }
    }

    result.final_loss = gam_loss(result.gen, result.atk, batch, game, /*snap=*/true).total;
    return result;
}

// The saddle where the generator masks nothing is locally stable; independent
// restarts with the winner picked by final training loss (the co-trained
// attacker is near its best response in either end state) sidestep it.
GamResult train_restarts(const GameSpec& game, const TrainConfig& cfg, bool conditional) {
    GamResult best;
    for (int r = 0; r < cfg.restarts; ++r) {
        TrainConfig run = cfg;
        run.seed = cfg.seed + 1000003ULL * static_cast<uint64_t>(r);
        GamResult res = train_impl(game, run, conditional);
        if (r == 0 || res.final_loss < best.final_loss) best = std::move(res);
    }
    return best;
}

}  // namespace

GamResult train_gam(const GameSpec& game, const TrainConfig& cfg) {
    return train_restarts(game, cfg, /*conditional=*/true);
}

GamResult train_unconditional(const GameSpec& game, const TrainConfig& cfg) {
    return train_restarts(game, cfg, /*conditional=*/false);
}

namespace {

constexpr char kMagic[8] = {'C', 'M', 'G', 'N', 'E', 'T', '1', '\0'};

void write_mlp(std::ofstream& out, const Mlp& net) {
    const int32_t nl = static_cast<int32_t>(net.layers.size());
    const int32_t act = net.output == Mlp::Output::Sigmoid ? 0 : 1;
    out.write(reinterpret_cast<const char*>(&nl), 4);
    out.write(reinterpret_cast<const char*>(&act), 4);
    for (const auto& layer : net.layers) {
        const int32_t rows = static_cast<int32_t>(layer.W.rows());
        const int32_t cols = static_cast<int32_t>(layer.W.cols());
        out.write(reinterpret_cast<const char*>(&rows), 4);
        out.write(reinterpret_cast<const char*>(&cols), 4);
        out.write(reinterpret_cast<const char*>(layer.W.data()), sizeof(double) * layer.W.size());
        out.write(reinterpret_cast<const char*>(layer.b.data()), sizeof(double) * layer.b.size());
    }
}

Mlp read_mlp(std::ifstream& in) {
    int32_t nl = 0, act = 0;
    in.read(reinterpret_cast<char*>(&nl), 4);
    in.read(reinterpret_cast<char*>(&act), 4);
    Mlp net;
    net.output = act == 0 ? Mlp::Output::Sigmoid : Mlp::Output::Softmax;
    for (int l = 0; l < nl; ++l) {
        int32_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), 4);
        in.read(reinterpret_cast<char*>(&cols), 4);
        Mlp::Layer layer;
        layer.W.resize(rows, cols);
        layer.b.resize(cols);
        in.read(reinterpret_cast<char*>(layer.W.data()), sizeof(double) * layer.W.size());
        in.read(reinterpret_cast<char*>(layer.b.data()), sizeof(double) * layer.b.size());
        net.layers.push_back(std::move(layer));
    }
    if (!in) throw SpecError("truncated network archive");
    return net;
}

}  // namespace

void save_net_archive(const GamResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot write network archive: " + path);
    out.write(kMagic, 8);
    const int32_t conditional = result.gen.conditional ? 1 : 0;
    const int32_t mn = result.gen.mn;
    out.write(reinterpret_cast<const char*>(&conditional), 4);
    out.write(reinterpret_cast<const char*>(&mn), 4);
    out.write(reinterpret_cast<const char*>(&result.seed), 8);
    const TrainConfig& c = result.cfg;
    const int32_t ints[6] = {c.batch, c.outer_iters, c.inner_steps,
                             c.snap_period, c.hidden, c.restarts};
    out.write(reinterpret_cast<const char*>(ints), sizeof(ints));
    const double dbls[3] = {c.lr_defender, c.lr_attacker, result.final_loss};
    out.write(reinterpret_cast<const char*>(dbls), sizeof(dbls));
    write_mlp(out, result.gen.net);
    write_mlp(out, result.atk.net);
}

GamResult load_net_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open network archive: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw SpecError("not a network archive: " + path);
    GamResult result;
    int32_t conditional = 0, mn = 0;
    in.read(reinterpret_cast<char*>(&conditional), 4);
    in.read(reinterpret_cast<char*>(&mn), 4);
    in.read(reinterpret_cast<char*>(&result.seed), 8);
    int32_t ints[6];
    in.read(reinterpret_cast<char*>(ints), sizeof(ints));
    double dbls[3];
    in.read(reinterpret_cast<char*>(dbls), sizeof(dbls));
    result.cfg.batch = ints[0];
    result.cfg.outer_iters = ints[1];
    result.cfg.inner_steps = ints[2];
    result.cfg.snap_period = ints[3];
    result.cfg.hidden = ints[4];
    result.cfg.restarts = ints[5];
    result.cfg.lr_defender = dbls[0];
    result.cfg.lr_attacker = dbls[1];
    result.cfg.seed = result.seed;
    result.final_loss = dbls[2];
    result.gen.conditional = conditional != 0;
    result.gen.mn = mn;
    result.gen.net = read_mlp(in);
    result.atk.net = read_mlp(in);
    return result;
}

}  // namespace cmg
