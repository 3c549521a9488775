#include "cmg/baselines.hpp"

#include <unordered_map>

#include "cmg/errors.hpp"
#include "cmg/game.hpp"

namespace cmg {

Mask random_mask(int n, int m, Rng& rng) {
    Mask y(static_cast<size_t>(n) * m);
    for (auto& b : y) b = rng.coin();
    return y;
}

Mask random_mask(int n, int m, uint64_t seed) {
    Rng rng(seed);
    return random_mask(n, m, rng);
}

namespace {

// Loss of a fixed per-device mask on a pre-drawn sample set: empirical
// best-response attack value plus the masking cost.
double fixed_mask_loss(const GameSpec& game, const Mask& device_mask,
                       const std::vector<Config>& samples,
                       const std::vector<std::vector<double>>& deltas) {
    const int len = game.joint_len();
    const size_t ne = game.exploits.size();
    Mask joint(len);
    for (int j = 0; j < len; ++j) joint[j] = device_mask[j % game.schema.n];

    std::unordered_map<Obs, std::vector<double>, VecHash> groups;
    Obs obs(len);
    for (size_t i = 0; i < samples.size(); ++i) {
        for (int j = 0; j < len; ++j) obs[j] = samples[i][j] * joint[j];
        auto [it, fresh] = groups.try_emplace(obs, ne, 0.0);
        for (size_t e = 0; e < ne; ++e) it->second[e] += deltas[i][e];
    }
    double attack = 0.0;
    for (const auto& [o, w] : groups) {
        double best = 0.0;
        for (size_t e = 0; e < ne; ++e)
            if (e == 0 || w[e] > best) best = w[e];
        if (!w.empty()) attack += best;
    }
    return attack / samples.size() + game.mask_cost(joint);
}

}  // namespace

GreedyResult greedy_mask(const GameSpec& game, int eval_budget, uint64_t seed) {
    game.validate();
    if (eval_budget <= 0) throw DomainError("greedy eval budget must be positive");
    const int n = game.schema.n;

    // One shared sample set keeps candidate comparisons paired and the whole
    // procedure deterministic in (game, seed, eval_budget).
    Rng rng(seed);
    std::vector<Config> samples(eval_budget);
    std::vector<std::vector<double>> deltas(eval_budget);
    for (int i = 0; i < eval_budget; ++i) {
        samples[i] = sample_joint(game, rng);
        deltas[i] = game.delta_vector(samples[i]);
    }

    GreedyResult result;
    result.mask.assign(n, 1);
    result.loss = fixed_mask_loss(game, result.mask, samples, deltas);

    while (true) {
        int best_attr = -1;
        double best_loss = result.loss;
        for (int j = 0; j < n; ++j) {
            if (!result.mask[j]) continue;
            Mask candidate = result.mask;
            candidate[j] = 0;
            const double loss = fixed_mask_loss(game, candidate, samples, deltas);
            if (loss < best_loss - 1e-12) {
                best_loss = loss;
                best_attr = j;
            }
        }
        if (best_attr < 0) break;
        result.mask[best_attr] = 0;
        result.loss = best_loss;
        result.masked_order.push_back(best_attr);
    }
    return result;
}

}  // namespace cmg
