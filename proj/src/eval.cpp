#include "cmg/eval.hpp"

#include <memory>

#include "cmg/errors.hpp"

namespace cmg {

DefenderSampler make_table_sampler(const GameSpec& game, const DefenderTable& q) {
    (void)game;
    return [q](Rng& rng, Config& x, Mask& y) {
        double u = rng.uniform01();
        size_t i = q.support.size() - 1;
        for (size_t k = 0; k < q.support.size(); ++k) {
            u -= q.prior[k];
            if (u <= 0.0) {
                i = k;
                break;
            }
        }
        x = q.support[i];
        double v = rng.uniform01();
        uint64_t yi = q.mask_count() - 1;
        for (uint64_t k = 0; k < q.mask_count(); ++k) {
            v -= q.q[i][k];
            if (v <= 0.0) {
                yi = k;
                break;
            }
        }
        y = mask_from_index(yi, q.mask_bits);
    };
}

DefenderSampler make_gam_sampler(const GameSpec& game, const GeneratorNet& gen) {
    // Generates in blocks so evaluation stays batched; draws from the Rng in a
    // fixed order, so results are reproducible.
    struct Block {
        std::vector<Config> xs;
        Eigen::MatrixXd ys;
        size_t at = 0;
    };
    auto block = std::make_shared<Block>();
    const int len = game.joint_len();
    return [game, gen, block, len](Rng& rng, Config& x, Mask& y) {
        if (block->at >= block->xs.size()) {
            constexpr int kBlock = 4096;
            block->xs.clear();
            Eigen::MatrixXd X(kBlock, len), R(kBlock, len);
            for (int i = 0; i < kBlock; ++i) {
                Config xi = sample_joint(game, rng);
                for (int j = 0; j < len; ++j) {
                    X(i, j) = xi[j];
                    R(i, j) = rng.uniform01();
                }
                block->xs.push_back(std::move(xi));
            }
            block->ys = generator_forward(gen, X, R, /*snap=*/true);
            block->at = 0;
        }
        x = block->xs[block->at];
        y.assign(len, 0);
        for (int j = 0; j < len; ++j) y[j] = block->ys(block->at, j) >= 0.5;
        ++block->at;
    };
}

DefenderSampler make_fixed_mask_sampler(const GameSpec& game, const Mask& device_mask) {
    if (static_cast<int>(device_mask.size()) != game.schema.n)
        throw SchemaError("fixed mask must have n entries");
    Mask joint;
    for (int k = 0; k < game.m; ++k)
        joint.insert(joint.end(), device_mask.begin(), device_mask.end());
    return [game, joint](Rng& rng, Config& x, Mask& y) {
        x = sample_joint(game, rng);
        y = joint;
    };
}

DefenderSampler make_random_mask_sampler(const GameSpec& game) {
    const int len = game.joint_len();
    return [game, len](Rng& rng, Config& x, Mask& y) {
        x = sample_joint(game, rng);
        y.resize(len);
        for (int j = 0; j < len; ++j) y[j] = rng.coin();
    };
}

namespace {

struct GroupedSamples {
    // Per observation: accumulated exploit weights and sample count.
    std::unordered_map<Obs, std::pair<std::vector<double>, int>, VecHash> groups;
    double total_cost = 0.0;
    std::vector<Obs> sample_obs;           // per sample, only if kept
    std::vector<std::vector<double>> sample_delta;
};

GroupedSamples collect(const DefenderSampler& sampler, const GameSpec& game, int M,
                       uint64_t seed, bool keep_samples) {
    if (M <= 0) throw DomainError("sample count M must be positive");
    const size_t ne = game.exploits.size();
    GroupedSamples out;
    Rng rng(seed);
    Config x;
    Mask y;
    for (int i = 0; i < M; ++i) {
        sampler(rng, x, y);
        Obs obs = observe(x, y);
        out.total_cost += game.mask_cost(y);
        auto d = game.delta_vector(x);
        auto [it, fresh] = out.groups.try_emplace(obs, std::vector<double>(ne, 0.0), 0);
        for (size_t e = 0; e < ne; ++e) it->second.first[e] += d[e];
        it->second.second += 1;
        if (keep_samples) {
            out.sample_obs.push_back(std::move(obs));
            out.sample_delta.push_back(std::move(d));
        }
    }
    return out;
}

int argmax_smallest(const std::vector<double>& w) {
    int best = 0;
    for (size_t e = 1; e < w.size(); ++e)
        if (w[e] > w[best]) best = static_cast<int>(e);
    return best;
}

}  // namespace

BestResponse empirical_best_response(const DefenderSampler& sampler, const GameSpec& game,
                                     int M, uint64_t seed) {
    GroupedSamples gs = collect(sampler, game, M, seed, /*keep_samples=*/false);
    BestResponse br;
    if (game.exploits.empty()) return br;
    double total = 0.0;
    for (const auto& [obs, acc] : gs.groups) {
        const int best = argmax_smallest(acc.first);
        br.choice[obs] = best;
        total += acc.first[best];
    }
    br.value = total / M;
    return br;
}

EvalReport evaluate(const DefenderSampler& sampler, const GameSpec& game, int M,
                    uint64_t seed) {
    GroupedSamples gs = collect(sampler, game, M, seed, /*keep_samples=*/false);
    EvalReport report;
    report.M = M;
    report.seed = seed;
    report.cost_term = gs.total_cost / M;
    report.exploit_freq.assign(game.exploits.size(), 0.0);
    if (!game.exploits.empty()) {
        double total = 0.0;
        for (const auto& [obs, acc] : gs.groups) {
            const int best = argmax_smallest(acc.first);
            total += acc.first[best];
            report.exploit_freq[best] += static_cast<double>(acc.second) / M;
        }
        report.attack_value = total / M;
    }
    report.defender_loss = report.attack_value + report.cost_term;
    return report;
}

AttackerPolicy make_table_attacker(const MixedAttackStrategy& z, int num_exploits) {
    return [z, num_exploits](const Obs& obs) {
        auto it = z.z.find(obs);
        if (it != z.z.end()) return it->second;
        // Unlisted observation: no information, play uniformly.
        return std::vector<double>(num_exploits, 1.0 / std::max(1, num_exploits));
    };
}

AttackerPolicy make_net_attacker(const AttackerNet& atk) {
    return [atk](const Obs& obs) {
        Eigen::MatrixXd in(1, obs.size());
        for (size_t i = 0; i < obs.size(); ++i) in(0, i) = obs[i];
        Eigen::MatrixXd z = atk.net.forward(in);
        return std::vector<double>(z.data(), z.data() + z.size());
    };
}

double equilibrium_gap(const DefenderSampler& sampler, const AttackerPolicy& attacker,
                       const GameSpec& game, int M, uint64_t seed) {
    GroupedSamples gs = collect(sampler, game, M, seed, /*keep_samples=*/true);
    if (game.exploits.empty()) return 0.0;

    double br_total = 0.0;
    std::unordered_map<Obs, std::vector<double>, VecHash> policy;
    for (const auto& [obs, acc] : gs.groups) {
        br_total += acc.first[argmax_smallest(acc.first)];
        policy.emplace(obs, attacker(obs));
    }
    double achieved = 0.0;
    for (size_t i = 0; i < gs.sample_obs.size(); ++i) {
        const auto& z = policy.at(gs.sample_obs[i]);
        for (size_t e = 0; e < z.size(); ++e) achieved += z[e] * gs.sample_delta[i][e];
    }
    return (br_total - achieved) / M;
}

}  // namespace cmg
